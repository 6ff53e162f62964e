"""
Canal de enlace direto satélite -> usuários (multifeixe, SFPB)

Modelo: entrada (n, k) =
    sqrt(G_sat·g(φ_nk)·G_rx / (κ·T·B)) · λ/(4π d_k) · sqrt(10^{-ξ_k/10})
    · e^{jψ_k} · sqrt(σ_n²) · 10^{margem/20}
com o ruído normalizado de forma que |h^H p|²/σ_n² seja a SNR do enlace
(p em mW, σ_n² em mW).
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import jv

from .cenario import ConfigCenario
from .excecoes import ArgumentoInvalidoError
from .utils import salvar_csv

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatrizCanal:
    """
    Canal H (N_t × K), coluna k = h_k

    Attributes:
        H: Matriz complexa N_t × K
        posicoes: Posições dos usuários no solo (K × 3, metros)
        chuva_db: Atenuação de chuva por usuário (dB)
        fases: Fase por usuário (rad)
    """
    H: np.ndarray
    posicoes: np.ndarray
    chuva_db: np.ndarray
    fases: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.H)):
            raise ArgumentoInvalidoError("Canal com entradas não finitas")
        if self.H.shape[1] != self.posicoes.shape[0]:
            raise ArgumentoInvalidoError(
                f"Canal com {self.H.shape[1]} colunas para {self.posicoes.shape[0]} usuários"
            )

    @property
    def n_feeds(self) -> int:
        return self.H.shape[0]

    @property
    def n_usuarios(self) -> int:
        return self.H.shape[1]


def raio_cobertura(cfg: ConfigCenario) -> float:
    """Raio da área de cobertura de um feixe no solo: h·tan(θ_3dB)"""
    return cfg.altura_satelite_m * np.tan(cfg.angulo_3db_rad)


def centros_feixes(cfg: ConfigCenario) -> np.ndarray:
    """
    Centros dos feixes no solo em anéis hexagonais

    O feixe 0 fica no nadir; o anel i tem 6i posições a raio i·√3·r,
    preenchidas em ordem.

    Returns:
        Matriz (N_t, 3) com z = 0
    """
    r = raio_cobertura(cfg)
    centros = [(0.0, 0.0)]
    anel = 1
    while len(centros) < cfg.n_feeds:
        n_posicoes = 6 * anel
        raio_anel = anel * np.sqrt(3) * r
        for j in range(n_posicoes):
            if len(centros) == cfg.n_feeds:
                break
            angulo = 2 * np.pi * j / n_posicoes
            centros.append((raio_anel * np.cos(angulo), raio_anel * np.sin(angulo)))
        anel += 1

    centros = np.array(centros)
    return np.column_stack([centros, np.zeros(len(centros))])


def posicionar_usuarios(cfg: ConfigCenario, rng: np.random.Generator) -> np.ndarray:
    """
    Sorteia um usuário uniformemente dentro da cobertura de cada feixe

    Args:
        cfg: Cenário (exige K = N_t)
        rng: Gerador numpy

    Returns:
        Posições (K, 3) no solo
    """
    if cfg.n_usuarios != cfg.n_feeds:
        raise ArgumentoInvalidoError(
            f"Cenário SFPB exige K = N_t (K={cfg.n_usuarios}, N_t={cfg.n_feeds})"
        )

    centros = centros_feixes(cfg)
    r = raio_cobertura(cfg)
    raios = r * np.sqrt(rng.uniform(size=cfg.n_usuarios))
    angulos = rng.uniform(0, 2 * np.pi, size=cfg.n_usuarios)

    posicoes = centros.copy()
    posicoes[:, 0] += raios * np.cos(angulos)
    posicoes[:, 1] += raios * np.sin(angulos)
    return posicoes


def ganho_padrao_feixe(u) -> np.ndarray:
    """
    Padrão normalizado g(u) = (J1(u)/(2u) + 36·J3(u)/u³)², com g(0) = 1
    """
    u = np.abs(np.asarray(u, dtype=float))
    pequeno = u < 1e-8
    seguro = np.where(pequeno, 1.0, u)
    g = (jv(1, seguro) / (2 * seguro) + 36 * jv(3, seguro) / seguro ** 3) ** 2
    return np.where(pequeno, 1.0, g)


def angulos_fora_eixo(cfg: ConfigCenario, posicoes: np.ndarray) -> np.ndarray:
    """
    Ângulo, visto do satélite, entre o centro do feixe n e o usuário k

    Returns:
        Matriz N_t × K (rad)
    """
    satelite = np.array([0.0, 0.0, cfg.altura_satelite_m])
    v_feixes = centros_feixes(cfg) - satelite
    v_usuarios = posicoes - satelite

    produto = v_feixes @ v_usuarios.T
    cruzado = np.linalg.norm(np.cross(v_feixes[:, None, :], v_usuarios[None, :, :]), axis=-1)
    return np.arctan2(cruzado, produto)


def montar_canal(cfg: ConfigCenario, posicoes: np.ndarray,
                 chuva_db: np.ndarray, fases: np.ndarray) -> MatrizCanal:
    """
    Constrói H de forma determinística dados atenuação e fases

    Args:
        cfg: Cenário
        posicoes: Posições dos usuários (K, 3)
        chuva_db: Atenuação de chuva ξ_k em dB (K)
        fases: Fase ψ_k (K)
    """
    posicoes = np.asarray(posicoes, dtype=float)
    chuva_db = np.asarray(chuva_db, dtype=float)
    fases = np.asarray(fases, dtype=float)

    satelite = np.array([0.0, 0.0, cfg.altura_satelite_m])
    distancias = np.linalg.norm(posicoes - satelite, axis=1)

    u = cfg.coef_padrao_feixe * np.sin(angulos_fora_eixo(cfg, posicoes)) / np.sin(cfg.angulo_3db_rad)
    ganho_feixe = ganho_padrao_feixe(u)

    g_sat = 10 ** (cfg.ganho_antena_satelite_dbi / 10)
    g_rx = 10 ** (cfg.ganho_antena_usuario_dbi / 10)
    ruido_termico_w = cfg.constante_boltzmann * cfg.temperatura_ruido_k * cfg.largura_banda_hz

    amplitude = np.sqrt(g_sat * ganho_feixe * g_rx / ruido_termico_w)
    espaco_livre = cfg.comprimento_onda / (4 * np.pi * distancias)
    chuva = np.sqrt(10 ** (-chuva_db / 10))
    # p em mW: 1e-3 converte para W; σ_n² reescala para o ruído configurado
    normalizacao = np.sqrt(cfg.ruido_mw * 1e-3) * 10 ** (cfg.margem_enlace_db / 20)

    H = amplitude * (espaco_livre * chuva * np.exp(1j * fases))[None, :] * normalizacao
    return MatrizCanal(H=H, posicoes=posicoes, chuva_db=chuva_db, fases=fases)


def sintetizar_canal(cfg: ConfigCenario, posicoes: np.ndarray,
                     rng: np.random.Generator) -> MatrizCanal:
    """
    Sorteia chuva (lognormal em dB) e fase por usuário e monta H

    Args:
        cfg: Cenário
        posicoes: Posições dos usuários
        rng: Gerador numpy

    Returns:
        MatrizCanal
    """
    k = posicoes.shape[0]
    chuva_db = np.exp(cfg.chuva_mu + np.sqrt(cfg.chuva_sigma2) * rng.standard_normal(k))
    fases = rng.uniform(0, 2 * np.pi, size=k)
    return montar_canal(cfg, posicoes, chuva_db, fases)


def gerar_canal(cfg: ConfigCenario, semente: Optional[int] = None) -> MatrizCanal:
    """Posiciona usuários e sintetiza o canal com a semente do cenário"""
    rng = np.random.default_rng(cfg.semente if semente is None else semente)
    posicoes = posicionar_usuarios(cfg, rng)
    canal = sintetizar_canal(cfg, posicoes, rng)

    snr = snr_mrt_db(canal, cfg)
    logger.debug(f"Canal gerado: SNR MRT por usuário {np.round(snr, 2)} dB")
    return canal


def snr_mrt_db(canal: MatrizCanal, cfg: ConfigCenario) -> np.ndarray:
    """
    SNR por usuário com filtro casado e P_t/N_t por feed: (P_t/N_t)‖h_k‖²/σ_n²
    """
    energia = np.sum(np.abs(canal.H) ** 2, axis=0)
    return 10 * np.log10(cfg.potencia_por_feed_mw * energia / cfg.ruido_mw)


def salvar_canal_csv(canal: MatrizCanal, caminho: str) -> None:
    """
    Exporta H em CSV, uma linha por feed, células "re,im"
    """
    colunas = ['feed'] + [f'usuario_{k}' for k in range(canal.n_usuarios)]
    linhas = []
    for n in range(canal.n_feeds):
        linha = {'feed': n}
        for k in range(canal.n_usuarios):
            valor = canal.H[n, k]
            linha[f'usuario_{k}'] = f"{float(valor.real)!r},{float(valor.imag)!r}"
        linhas.append(linha)
    salvar_csv(linhas, caminho, colunas)
    logger.info(f"Canal salvo: {caminho}")
