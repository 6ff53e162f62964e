"""
Configuração do cenário de simulação
Constantes físicas do enlace, geometrias dos arranjos, verdade do alvo
e parâmetros do otimizador / estimador
"""

import logging
from dataclasses import dataclass, fields, asdict, replace
from enum import Enum
from typing import Dict, Any, Optional, Tuple

import numpy as np
from scipy import constants

from .arranjos import (
    GeometriaArranjo,
    AngulosAlvo,
    criar_uca,
    criar_ula,
    raio_uca_padrao,
)
from .excecoes import ArgumentoInvalidoError, ErroConfiguracao
from .utils import carregar_yaml, hash_dados

logger = logging.getLogger(__name__)

SUFIXO_RAD = '_rad'
SUFIXO_GRAUS = '_graus'


class Estrategia(str, Enum):
    """Estratégia de acesso múltiplo do projeto DFRC"""
    RSMA = 'rsma'
    SDMA = 'sdma'
    RADAR = 'radar'

    @classmethod
    def de_texto(cls, texto: str) -> 'Estrategia':
        try:
            return cls(str(texto).strip().lower())
        except ValueError:
            validas = ', '.join(e.value for e in cls)
            raise ArgumentoInvalidoError(
                f"Estratégia desconhecida '{texto}' (válidas: {validas})"
            ) from None


@dataclass(frozen=True)
class ConfigCenario:
    """
    Parâmetros do cenário (padrões reproduzem o cenário de referência do enlace LEO)

    Ângulos são guardados em radianos (campos *_rad); no arquivo YAML
    aparecem em graus com o sufixo _graus.
    """
    # Enlace de comunicação
    frequencia_portadora_hz: float = 20e9
    altura_satelite_m: float = 1000e3
    largura_banda_hz: float = 25e6
    angulo_3db_rad: float = float(np.radians(0.4))
    ganho_antena_satelite_dbi: float = 17.0
    ganho_antena_usuario_dbi: float = 38.0  # terminal Ka, parabólica de ~60 cm
    margem_enlace_db: float = 30.0  # ganho agregado do enlace; 0 remove o termo
    coef_padrao_feixe: float = 2.802
    temperatura_ruido_k: float = 517.0
    constante_boltzmann: float = 1.38e-23
    chuva_mu: float = -2.6
    chuva_sigma2: float = 1.63
    n_feeds: int = 9
    n_usuarios: int = 9
    potencia_total_dbm: float = 30.0
    ruido_dbm: float = 0.0
    r_th: float = 4.0

    # Radar biestático
    n_rx: int = 10
    raio_uca_m: Optional[float] = None
    espacamento_ula_m: Optional[float] = None
    snr_radar_db: float = 28.0
    ruido_radar: float = 1.0
    theta_alvo_rad: float = float(np.radians(45.0))
    phi_alvo_rad: float = float(np.radians(83.0))
    doppler_hz: float = 2000.0
    fase_alfa_rad: float = 0.0
    n_simbolos: int = 256
    amostras_por_simbolo: int = 64
    periodo_simbolo_s: float = 4e-6
    semente: int = 0

    # Otimizador
    epsilon: float = 1e-4
    max_iteracoes: int = 100
    lambda_pen_inicial: float = 10.0
    fator_lambda_pen: float = 5.0
    lambda_pen_max: float = 1e5
    razao_posto_min: float = 0.999
    tolerancia_violacao: float = 1e-7
    fracao_comum_inicial: float = 1e-3
    inicializacao: str = 'max_min'
    max_iteracoes_max_min: int = 30
    solver: str = 'CLARABEL'

    # Estimador
    carga_diagonal: float = 1e-4
    n_fft: int = 1024
    modo_doppler: str = 'lento'
    theta_min_rad: float = float(np.radians(35.0))
    theta_max_rad: float = float(np.radians(55.0))
    phi_min_rad: float = float(np.radians(73.0))
    phi_max_rad: float = float(np.radians(90.0))
    passo_grade_rad: float = float(np.radians(0.5))
    passo_refino_rad: float = float(np.radians(0.05))

    def __post_init__(self):
        self._validar()

    def _validar(self) -> None:
        positivos = [
            'frequencia_portadora_hz', 'altura_satelite_m', 'largura_banda_hz',
            'angulo_3db_rad', 'coef_padrao_feixe', 'temperatura_ruido_k',
            'constante_boltzmann', 'ruido_radar', 'periodo_simbolo_s', 'epsilon',
            'lambda_pen_inicial', 'lambda_pen_max', 'tolerancia_violacao',
            'carga_diagonal', 'passo_grade_rad',
        ]
        for nome in positivos:
            if not getattr(self, nome) > 0:
                raise ErroConfiguracao(nome, f"deve ser positivo, recebido {getattr(self, nome)}")

        for nome in ['n_feeds', 'n_usuarios', 'n_rx', 'n_simbolos',
                     'amostras_por_simbolo', 'max_iteracoes', 'n_fft']:
            if getattr(self, nome) < 1:
                raise ErroConfiguracao(nome, f"deve ser >= 1, recebido {getattr(self, nome)}")

        if self.chuva_sigma2 < 0:
            raise ErroConfiguracao('chuva_sigma2', "variância não pode ser negativa")
        if self.r_th < 0:
            raise ErroConfiguracao('r_th', "taxa mínima não pode ser negativa")
        if self.fator_lambda_pen <= 1:
            raise ErroConfiguracao('fator_lambda_pen', "deve ser maior que 1")
        if not 0 < self.razao_posto_min <= 1:
            raise ErroConfiguracao('razao_posto_min', "deve estar em (0, 1]")
        if self.n_fft < self.amostras_por_simbolo:
            raise ErroConfiguracao('n_fft', "deve ser >= amostras_por_simbolo")
        if self.inicializacao not in ('max_min', 'filtro_casado'):
            raise ErroConfiguracao('inicializacao', "use 'max_min' ou 'filtro_casado'")
        if self.modo_doppler not in ('literal', 'lento'):
            raise ErroConfiguracao('modo_doppler', "use 'literal' ou 'lento'")
        if self.passo_refino_rad < 0:
            raise ErroConfiguracao('passo_refino_graus', "não pode ser negativo")
        for nome in ['raio_uca_m', 'espacamento_ula_m']:
            valor = getattr(self, nome)
            if valor is not None and not valor > 0:
                raise ErroConfiguracao(nome, f"deve ser positivo, recebido {valor}")

        try:
            self.alvo
        except ArgumentoInvalidoError as e:
            raise ErroConfiguracao('theta_alvo_graus/phi_alvo_graus', str(e)) from e

    # ------------------------------------------------------------------
    # Grandezas derivadas
    # ------------------------------------------------------------------

    @property
    def comprimento_onda(self) -> float:
        return constants.c / self.frequencia_portadora_hz

    @property
    def potencia_total_mw(self) -> float:
        return 10 ** (self.potencia_total_dbm / 10)

    @property
    def potencia_por_feed_mw(self) -> float:
        return self.potencia_total_mw / self.n_feeds

    @property
    def ruido_mw(self) -> float:
        return 10 ** (self.ruido_dbm / 10)

    @property
    def periodo_amostra_s(self) -> float:
        return self.periodo_simbolo_s / self.amostras_por_simbolo

    @property
    def alvo(self) -> AngulosAlvo:
        return AngulosAlvo(self.theta_alvo_rad, self.phi_alvo_rad)

    @property
    def alpha2(self) -> float:
        """|α|² = 10^{SNR/10}·σ_m²/P_t"""
        return 10 ** (self.snr_radar_db / 10) * self.ruido_radar / self.potencia_total_mw

    @property
    def alpha(self) -> complex:
        return complex(np.sqrt(self.alpha2) * np.exp(1j * self.fase_alfa_rad))

    # ------------------------------------------------------------------
    # Conversões
    # ------------------------------------------------------------------

    @classmethod
    def from_dict(cls, dados: Dict[str, Any]) -> 'ConfigCenario':
        """
        Cria configuração a partir de um dicionário plano (formato do YAML)

        Args:
            dados: Mapeamento chave -> valor; chaves *_graus são convertidas

        Returns:
            ConfigCenario validada

        Raises:
            ErroConfiguracao: chave desconhecida ou valor de tipo inválido
        """
        if not isinstance(dados, dict):
            raise ErroConfiguracao('<raiz>', "o arquivo deve conter um mapeamento chave: valor")

        tipos = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for chave, valor in dados.items():
            nome = chave
            if chave.endswith(SUFIXO_GRAUS):
                nome = chave[:-len(SUFIXO_GRAUS)] + SUFIXO_RAD
            if nome not in tipos or nome.endswith(SUFIXO_RAD) and chave == nome:
                raise ErroConfiguracao(chave, "chave desconhecida")
            kwargs[nome] = _converter_valor(chave, valor, tipos[nome])
            if chave.endswith(SUFIXO_GRAUS):
                kwargs[nome] = float(np.radians(kwargs[nome]))

        return cls(**kwargs)

    def to_dict(self) -> Dict[str, Any]:
        """Dicionário no formato do arquivo (ângulos em graus)"""
        saida = {}
        for nome, valor in asdict(self).items():
            if nome.endswith(SUFIXO_RAD):
                saida[nome[:-len(SUFIXO_RAD)] + SUFIXO_GRAUS] = float(np.degrees(valor))
            else:
                saida[nome] = valor
        return saida

    def hash(self) -> str:
        """Hash do cenário (rastreia resultados até a configuração)"""
        return hash_dados(self.to_dict())

    def com(self, **alteracoes) -> 'ConfigCenario':
        """Cópia com campos alterados (revalidada)"""
        return replace(self, **alteracoes)


def _converter_valor(chave: str, valor: Any, tipo: Any) -> Any:
    tipo_txt = tipo.__name__ if isinstance(tipo, type) else str(tipo)
    if 'Optional' in tipo_txt and valor is None:
        return None
    if isinstance(valor, bool):
        raise ErroConfiguracao(chave, f"valor booleano não esperado: {valor}")
    try:
        if 'int' in tipo_txt:
            if isinstance(valor, float) and not valor.is_integer():
                raise ValueError(valor)
            return int(valor)
        if 'float' in tipo_txt:
            return float(valor)
        if 'str' in tipo_txt:
            if not isinstance(valor, str):
                raise ValueError(valor)
            return valor
    except (TypeError, ValueError):
        raise ErroConfiguracao(chave, f"tipo inválido ({valor!r}), esperado {tipo_txt}") from None
    return valor


def carregar_cenario(caminho: Optional[str] = None) -> ConfigCenario:
    """
    Carrega cenário de arquivo YAML plano

    Args:
        caminho: Caminho do arquivo (None usa apenas os padrões)

    Returns:
        ConfigCenario
    """
    if caminho is None:
        logger.info("Usando cenário padrão (referência)")
        return ConfigCenario()

    dados = carregar_yaml(caminho)
    cfg = ConfigCenario.from_dict(dados)
    logger.info(f"Cenário carregado de {caminho} (hash {cfg.hash()})")
    return cfg


def montar_geometrias(cfg: ConfigCenario) -> Tuple[GeometriaArranjo, GeometriaArranjo]:
    """
    Geometrias de transmissão (UCA com N_t feeds) e recepção (ULA com N_r)

    Returns:
        (geometria_tx, geometria_rx)
    """
    lam = cfg.comprimento_onda
    raio = cfg.raio_uca_m or raio_uca_padrao(cfg.n_feeds, lam)
    espacamento = cfg.espacamento_ula_m or lam / 2
    return criar_uca(cfg.n_feeds, raio, lam), criar_ula(cfg.n_rx, espacamento, lam)
