"""
Orquestração de experimentos: varreduras de RCRB, experimento de estimação
Monte-Carlo e suíte de verificação de invariantes
"""

import os
import time
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict
from typing import Dict, Any, List, Optional, Tuple

import numpy as np
import cvxpy as cp

from .arranjos import (
    AngulosAlvo,
    direcao_tx,
    direcao_rx,
    derivadas_direcao_tx,
    derivada_direcao_rx,
)
from .cache_manager import CacheManager
from .canal import gerar_canal
from .cenario import ConfigCenario, Estrategia, carregar_cenario, montar_geometrias
from .crb import calcular_crb, calcular_fim, criar_contexto_fim
from .estimador import (
    acerto_doppler,
    estimar,
    largura_bin_doppler,
    salvar_espectro_csv,
    salvar_espectro_doppler_csv,
)
from .excecoes import (
    ErroDFRC,
    ErroConfiguracao,
    ErroInviabilidade,
    ErroPostoUm,
    ErroRestricaoViolada,
    ErroSolver,
    ErroInterno,
    AlvoNaoIdentificavelError,
)
from .otimizador import MODO_CRB, ResultadoOtimizacao, executar_sca
from .programa_conico import BackendCvxpy, ProgramaConico, bloco_schur, resolver_subproblema
from .sinais import simular_cpi
from .taxas import ConjuntoPrecoders
from .utils import (
    carregar_yaml,
    gerar_nome_arquivo,
    obter_num_workers,
    para_json,
    salvar_csv,
    salvar_json,
)

logger = logging.getLogger(__name__)

VARIAVEIS_VARREDURA = ('r_th', 'snr_radar_db')
CATEGORIA_CACHE = 'otimizacao'

COLUNAS_VARREDURA = [
    'estrategia', 'variavel', 'valor', 'semente', 'status',
    'rcrb_theta_graus', 'rcrb_phi_graus', 'traco_crb', 'n_iteracoes', 'hash_cenario',
]
COLUNAS_SEMENTES = [
    'estrategia', 'valor', 'semente', 'theta_graus', 'phi_graus', 'doppler_hz',
    'erro_theta_graus', 'erro_phi_graus', 'erro_doppler_hz',
    'acerto_doppler', 'acerto_angulo', 'razao_pico_mediana',
]
COLUNAS_RMSE = [
    'estrategia', 'valor', 'n_sementes', 'rmse_theta_graus', 'rmse_phi_graus',
    'rcrb_theta_graus', 'rcrb_phi_graus', 'razao_rmse_rcrb_theta', 'razao_rmse_rcrb_phi',
    'taxa_acerto_doppler', 'largura_bin_hz', 'taxa_acerto_angulo', 'razao_pico_mediana_media',
    'hash_cenario',
]

_STATUS_ERRO = (
    (ErroInviabilidade, 'inviavel'),
    (ErroPostoUm, 'posto_um'),
    (ErroRestricaoViolada, 'taxa_violada'),
    (ErroSolver, 'erro_solver'),
    (ErroInterno, 'erro_interno'),
    (AlvoNaoIdentificavelError, 'nao_identificavel'),
)


@dataclass
class EspecificacaoExperimento:
    """
    Especificação de varredura

    Attributes:
        cenario: Cenário base
        variavel: 'r_th' ou 'snr_radar_db'
        valores: Valores da variável
        estrategias: Estratégias avaliadas
        sementes: Sementes (canal na varredura, ruído/símbolos na estimação)
        saida: Diretório de saída
    """
    cenario: ConfigCenario
    variavel: str
    valores: List[float]
    estrategias: List[Estrategia]
    sementes: List[int]
    saida: str = 'resultados'

    def __post_init__(self):
        if self.variavel not in VARIAVEIS_VARREDURA:
            raise ErroConfiguracao('variavel', f"deve ser uma de {VARIAVEIS_VARREDURA}")
        if not self.valores:
            raise ErroConfiguracao('valores', "lista de valores vazia")
        if not self.estrategias:
            raise ErroConfiguracao('estrategias', "nenhuma estratégia informada")
        if not self.sementes:
            raise ErroConfiguracao('sementes', "nenhuma semente informada")
        if len(set(self.sementes)) != len(self.sementes):
            raise ErroConfiguracao('sementes', "sementes repetidas")

    def cenario_ponto(self, valor: float, semente: Optional[int] = None) -> ConfigCenario:
        """Cenário com a variável de varredura (e a semente, se dada) aplicadas"""
        alteracoes: Dict[str, Any] = {self.variavel: float(valor)}
        if semente is not None:
            alteracoes['semente'] = int(semente)
        return self.cenario.com(**alteracoes)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'cenario': self.cenario.to_dict(),
            'hash_cenario': self.cenario.hash(),
            'variavel': self.variavel,
            'valores': list(self.valores),
            'estrategias': [e.value for e in self.estrategias],
            'sementes': list(self.sementes),
            'saida': self.saida,
        }


def especificacao_de_dict(dados: Dict[str, Any], base_dir: str = '.') -> EspecificacaoExperimento:
    """
    Monta a especificação a partir do mapeamento do YAML

    Args:
        dados: Chaves cenario, variavel, valores, estrategias, sementes, saida
        base_dir: Diretório para resolver o caminho relativo do cenário

    Raises:
        ErroConfiguracao: chave ausente, desconhecida ou inválida
    """
    if not isinstance(dados, dict):
        raise ErroConfiguracao('<raiz>', "o arquivo deve conter um mapeamento chave: valor")

    conhecidas = {'cenario', 'variavel', 'valores', 'estrategias', 'sementes', 'saida'}
    for chave in dados:
        if chave not in conhecidas:
            raise ErroConfiguracao(chave, "chave desconhecida")

    cenario = dados.get('cenario')
    if cenario is None:
        cfg = ConfigCenario()
    elif isinstance(cenario, dict):
        cfg = ConfigCenario.from_dict(cenario)
    elif isinstance(cenario, str):
        caminho = cenario if os.path.isabs(cenario) else os.path.join(base_dir, cenario)
        if not os.path.exists(caminho) and os.path.exists(cenario):
            caminho = cenario
        cfg = carregar_cenario(caminho)
    else:
        raise ErroConfiguracao('cenario', "deve ser um caminho ou um mapeamento")

    for chave in ('variavel', 'valores', 'estrategias'):
        if chave not in dados:
            raise ErroConfiguracao(chave, "chave obrigatória ausente")

    try:
        valores = [float(v) for v in dados['valores']]
        estrategias = [Estrategia.de_texto(str(e)) for e in dados['estrategias']]
        sementes = [int(s) for s in dados.get('sementes', [cfg.semente if cfg.semente is not None else 0])]
    except (TypeError, ValueError) as e:
        raise ErroConfiguracao('valores/estrategias/sementes', str(e)) from None

    return EspecificacaoExperimento(
        cenario=cfg,
        variavel=str(dados['variavel']),
        valores=valores,
        estrategias=estrategias,
        sementes=sementes,
        saida=str(dados.get('saida', 'resultados')),
    )


def carregar_especificacao(caminho: str) -> EspecificacaoExperimento:
    """Carrega especificação de experimento (YAML)"""
    dados = carregar_yaml(caminho)
    spec = especificacao_de_dict(dados, os.path.dirname(os.path.abspath(caminho)))
    logger.info(
        f"Experimento carregado de {caminho}: {spec.variavel} = {spec.valores}, "
        f"{len(spec.estrategias)} estratégia(s), {len(spec.sementes)} semente(s)"
    )
    return spec


# ----------------------------------------------------------------------
# Execução de pontos do otimizador (com cache)
# ----------------------------------------------------------------------

@dataclass
class LinhaVarredura:
    """Uma linha da tabela de RCRB (pontos inviáveis incluídos)"""
    estrategia: str
    variavel: str
    valor: float
    semente: Optional[int]
    status: str
    rcrb_theta_graus: Optional[float] = None
    rcrb_phi_graus: Optional[float] = None
    traco_crb: Optional[float] = None
    n_iteracoes: Optional[int] = None
    hash_cenario: str = ''
    tempo_s: float = 0.0
    mensagem: str = ''

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def resumo_otimizacao(resultado: ResultadoOtimizacao) -> Dict[str, Any]:
    """Dados do resultado guardados em cache e usados pela estimação"""
    return {
        'status': resultado.status,
        'n_iteracoes': resultado.n_iteracoes,
        'tempo_s': resultado.tempo_s,
        'objetivo_normalizado': resultado.objetivo,
        'crb': resultado.crb.to_dict(),
        'taxas': resultado.taxas.to_dict() if resultado.taxas else None,
        'beamformers': resultado.beamformers.to_dict(),
        'verificacao': resultado.verificacao,
    }


def _status_erro(erro: ErroDFRC) -> str:
    for classe, status in _STATUS_ERRO:
        if isinstance(erro, classe):
            return status
    return 'erro'


def otimizar_com_cache(cfg: ConfigCenario, estrategia: Estrategia,
                       cache: Optional[CacheManager] = None) -> Dict[str, Any]:
    """
    Executa (ou recupera do cache) uma otimização e devolve o resumo

    A chave é (hash do cenário, estratégia, R_th, semente).
    """
    params = {
        'hash_cenario': cfg.hash(),
        'estrategia': estrategia.value,
        'r_th': cfg.r_th,
        'semente': cfg.semente,
    }
    if cache is not None:
        em_cache = cache.get(CATEGORIA_CACHE, params)
        if em_cache is not None:
            return em_cache

    geom_tx, geom_rx = montar_geometrias(cfg)
    ctx = criar_contexto_fim(cfg, geom_tx, geom_rx)
    canal = gerar_canal(cfg)
    resultado = executar_sca(ctx, canal, cfg, estrategia)
    resumo = resumo_otimizacao(resultado)

    if cache is not None:
        cache.set(CATEGORIA_CACHE, params, para_json(resumo))
    return resumo


def executar_ponto(cfg: ConfigCenario, estrategia: Estrategia, variavel: str, valor: float,
                   cache_dir: Optional[str] = '.cache') -> Tuple[LinhaVarredura, Optional[Dict[str, Any]]]:
    """
    Executa um ponto da varredura sem propagar erros do otimizador

    Função de módulo para poder ser enviada a processos do pool.

    Returns:
        (linha, resumo) com resumo None quando o ponto falha
    """
    inicio = time.perf_counter()
    linha = LinhaVarredura(
        estrategia=estrategia.value,
        variavel=variavel,
        valor=float(valor),
        semente=cfg.semente,
        status='',
        hash_cenario=cfg.hash(),
    )
    cache = CacheManager(cache_dir) if cache_dir else None

    try:
        resumo = otimizar_com_cache(cfg, estrategia, cache)
    except ErroDFRC as e:
        linha.status = _status_erro(e)
        linha.mensagem = str(e)
        linha.tempo_s = time.perf_counter() - inicio
        logger.warning(f"Ponto {estrategia.value} {variavel}={valor} semente={cfg.semente}: {linha.status} ({e})")
        return linha, None

    crb = resumo['crb']
    linha.status = resumo['status']
    linha.rcrb_theta_graus = crb['rcrb_theta_graus']
    linha.rcrb_phi_graus = crb['rcrb_phi_graus']
    linha.traco_crb = crb['traco_crb']
    linha.n_iteracoes = resumo['n_iteracoes']
    linha.tempo_s = time.perf_counter() - inicio
    return linha, resumo


def _executar_pontos(tarefas: List[Tuple[ConfigCenario, Estrategia, str, float]],
                     workers: int, cache_dir: Optional[str]) -> List[Tuple[LinhaVarredura, Optional[Dict]]]:
    if workers <= 1 or len(tarefas) <= 1:
        return [executar_ponto(*tarefa, cache_dir=cache_dir) for tarefa in tarefas]

    logger.info(f"Executando {len(tarefas)} ponto(s) com {workers} worker(s)")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futuros = [pool.submit(executar_ponto, *tarefa, cache_dir=cache_dir) for tarefa in tarefas]
        return [f.result() for f in futuros]


def _ordem(spec: EspecificacaoExperimento, estrategia: str) -> int:
    return [e.value for e in spec.estrategias].index(estrategia)


# ----------------------------------------------------------------------
# Varredura de RCRB
# ----------------------------------------------------------------------

def executar_varredura_rcrb(spec: EspecificacaoExperimento, workers: Optional[int] = None,
                            cache_dir: Optional[str] = '.cache') -> List[LinhaVarredura]:
    """
    Uma otimização por (estratégia, valor, semente); CSV e JSON em spec.saida

    Args:
        spec: Especificação
        workers: Processos em paralelo (padrão DFRC_WORKERS)
        cache_dir: Diretório do cache (None desativa)

    Returns:
        Linhas ordenadas por (estratégia, valor, semente)
    """
    workers = workers or obter_num_workers()
    tarefas = [
        (spec.cenario_ponto(valor, semente), estrategia, spec.variavel, valor)
        for estrategia in spec.estrategias
        for valor in spec.valores
        for semente in spec.sementes
    ]
    logger.info(f"🔄 Varredura de RCRB: {len(tarefas)} otimização(ões)")

    linhas = [linha for linha, _ in _executar_pontos(tarefas, workers, cache_dir)]
    linhas.sort(key=lambda l: (_ordem(spec, l.estrategia), l.valor, l.semente))

    nome = f"rcrb_{spec.variavel}"
    salvar_csv((l.to_dict() for l in linhas), os.path.join(spec.saida, f"{nome}.csv"), COLUNAS_VARREDURA)
    salvar_json(
        {'especificacao': spec.to_dict(), 'linhas': [l.to_dict() for l in linhas]},
        os.path.join(spec.saida, f"{nome}.json"),
    )

    falhas = sum(1 for l in linhas if l.rcrb_theta_graus is None)
    logger.info(f"✓ Varredura concluída: {len(linhas) - falhas} ponto(s) ok, {falhas} sem solução")
    return linhas


# ----------------------------------------------------------------------
# Experimento de estimação
# ----------------------------------------------------------------------

def _diferenca_angular(a: float, b: float) -> float:
    return float(np.angle(np.exp(1j * (a - b))))


def _estimar_sementes(spec: EspecificacaoExperimento, cfg: ConfigCenario, estrategia: Estrategia,
                      valor: float, bf: ConjuntoPrecoders,
                      passo_grade: Optional[float]) -> List[Dict[str, Any]]:
    geometrias = montar_geometrias(cfg)
    passo = cfg.passo_grade_rad if passo_grade is None else passo_grade
    linhas = []

    for indice, semente in enumerate(spec.sementes):
        rng = np.random.default_rng(semente)
        conjunto = simular_cpi(cfg, bf, geometrias, rng)
        resultado = estimar(conjunto, cfg, geometrias, passo)
        largura = largura_bin_doppler(conjunto, cfg.n_fft, cfg.modo_doppler)

        erro_theta = _diferenca_angular(resultado.theta, cfg.theta_alvo_rad)
        erro_phi = resultado.phi - cfg.phi_alvo_rad
        erro_doppler = resultado.doppler_hz - cfg.doppler_hz
        linhas.append({
            'estrategia': estrategia.value,
            'valor': float(valor),
            'semente': semente,
            'theta_graus': float(np.degrees(resultado.theta)),
            'phi_graus': float(np.degrees(resultado.phi)),
            'doppler_hz': resultado.doppler_hz,
            'erro_theta_graus': float(np.degrees(erro_theta)),
            'erro_phi_graus': float(np.degrees(erro_phi)),
            'erro_doppler_hz': float(erro_doppler),
            'acerto_doppler': int(acerto_doppler(resultado.doppler_hz, cfg.doppler_hz, largura)),
            'acerto_angulo': int(abs(erro_theta) <= passo * (1 + 1e-9) and abs(erro_phi) <= passo * (1 + 1e-9)),
            'razao_pico_mediana': resultado.razao_pico_mediana,
            'largura_bin_hz': largura,
        })

        if indice == 0:
            salvar_espectro_csv(resultado, os.path.join(
                spec.saida, gerar_nome_arquivo('espectro', estrategia.value, valor, semente)))
            salvar_espectro_doppler_csv(resultado, os.path.join(
                spec.saida, gerar_nome_arquivo('doppler', estrategia.value, valor, semente)))
    return linhas


def agregar_estimacao(linhas: List[Dict[str, Any]], crb: Dict[str, Any],
                      hash_cenario: str) -> Dict[str, Any]:
    """RMSE angular contra o RCRB e taxas de acerto de um ponto"""
    erros_theta = np.array([l['erro_theta_graus'] for l in linhas])
    erros_phi = np.array([l['erro_phi_graus'] for l in linhas])
    rmse_theta = float(np.sqrt(np.mean(erros_theta ** 2)))
    rmse_phi = float(np.sqrt(np.mean(erros_phi ** 2)))
    return {
        'estrategia': linhas[0]['estrategia'],
        'valor': linhas[0]['valor'],
        'n_sementes': len(linhas),
        'rmse_theta_graus': rmse_theta,
        'rmse_phi_graus': rmse_phi,
        'rcrb_theta_graus': crb['rcrb_theta_graus'],
        'rcrb_phi_graus': crb['rcrb_phi_graus'],
        'razao_rmse_rcrb_theta': rmse_theta / crb['rcrb_theta_graus'],
        'razao_rmse_rcrb_phi': rmse_phi / crb['rcrb_phi_graus'],
        'taxa_acerto_doppler': float(np.mean([l['acerto_doppler'] for l in linhas])),
        'largura_bin_hz': linhas[0]['largura_bin_hz'],
        'taxa_acerto_angulo': float(np.mean([l['acerto_angulo'] for l in linhas])),
        'razao_pico_mediana_media': float(np.mean([l['razao_pico_mediana'] for l in linhas])),
        'hash_cenario': hash_cenario,
    }


def executar_experimento_estimacao(spec: EspecificacaoExperimento,
                                   passo_grade: Optional[float] = None,
                                   workers: Optional[int] = None,
                                   cache_dir: Optional[str] = '.cache') -> Dict[str, Any]:
    """
    Otimiza cada (estratégia, valor) com a semente do cenário e estima
    (F_D, θ, φ) em um CPI por semente de spec.sementes

    Returns:
        {'sementes': linhas por semente, 'agregado': tabela RMSE vs RCRB,
         'pontos': linhas do otimizador}
    """
    workers = workers or obter_num_workers()
    tarefas = [
        (spec.cenario_ponto(valor), estrategia, spec.variavel, valor)
        for estrategia in spec.estrategias
        for valor in spec.valores
    ]
    logger.info(
        f"🔄 Experimento de estimação: {len(tarefas)} ponto(s) × {len(spec.sementes)} semente(s)"
    )
    pontos = _executar_pontos(tarefas, workers, cache_dir)

    por_semente: List[Dict[str, Any]] = []
    agregado: List[Dict[str, Any]] = []
    for (cfg, estrategia, _, valor), (linha, resumo) in zip(tarefas, pontos):
        if resumo is None:
            logger.warning(f"Sem beamformers para {estrategia.value} {spec.variavel}={valor}: {linha.status}")
            continue
        bf = ConjuntoPrecoders.from_dict(resumo['beamformers'])
        linhas = _estimar_sementes(spec, cfg, estrategia, valor, bf, passo_grade)
        por_semente.extend(linhas)
        agregado.append(agregar_estimacao(linhas, resumo['crb'], cfg.hash()))
        logger.info(
            f"✓ {estrategia.value} {spec.variavel}={valor}: "
            f"RMSE θ={agregado[-1]['rmse_theta_graus']:.4f}° (RCRB {agregado[-1]['rcrb_theta_graus']:.4f}°), "
            f"acerto Doppler {agregado[-1]['taxa_acerto_doppler']:.0%}"
        )

    por_semente.sort(key=lambda l: (_ordem(spec, l['estrategia']), l['valor'], l['semente']))
    agregado.sort(key=lambda l: (_ordem(spec, l['estrategia']), l['valor']))

    salvar_csv(por_semente, os.path.join(spec.saida, 'estimacao_sementes.csv'), COLUNAS_SEMENTES)
    salvar_csv(agregado, os.path.join(spec.saida, 'estimacao_rmse.csv'), COLUNAS_RMSE)
    saida = {
        'especificacao': spec.to_dict(),
        'pontos': [linha.to_dict() for linha, _ in pontos],
        'sementes': por_semente,
        'agregado': agregado,
    }
    salvar_json(saida, os.path.join(spec.saida, 'estimacao.json'))
    return saida


# ----------------------------------------------------------------------
# Suíte de invariantes
# ----------------------------------------------------------------------

@dataclass
class VerificacaoInvariante:
    nome: str
    ok: bool
    valor: float
    limite: float
    detalhe: str = ''

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _erro_relativo(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / max(np.linalg.norm(b), 1e-300))


def _covariancia_aleatoria(n: int, rng: np.random.Generator) -> np.ndarray:
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return G @ G.conj().T / n


def verificar_derivadas(cfg: ConfigCenario, passo: float = 1e-6) -> VerificacaoInvariante:
    """Derivadas analíticas de a e b contra diferenças centrais"""
    geom_tx, geom_rx = montar_geometrias(cfg)
    theta, phi = cfg.theta_alvo_rad, cfg.phi_alvo_rad
    da_dt, da_dp = derivadas_direcao_tx(geom_tx, AngulosAlvo(theta, phi))
    db_dt = derivada_direcao_rx(geom_rx, theta)

    fd_at = (direcao_tx(geom_tx, AngulosAlvo(theta + passo, phi))
             - direcao_tx(geom_tx, AngulosAlvo(theta - passo, phi))) / (2 * passo)
    fd_ap = (direcao_tx(geom_tx, AngulosAlvo(theta, phi + passo))
             - direcao_tx(geom_tx, AngulosAlvo(theta, phi - passo))) / (2 * passo)
    fd_bt = (direcao_rx(geom_rx, theta + passo) - direcao_rx(geom_rx, theta - passo)) / (2 * passo)

    erro = max(_erro_relativo(da_dt, fd_at), _erro_relativo(da_dp, fd_ap), _erro_relativo(db_dt, fd_bt))
    return VerificacaoInvariante('derivadas_direcao', erro < 1e-5, erro, 1e-5)


def verificar_fim(cfg: ConfigCenario, rng: np.random.Generator, instancias: int = 20,
                  passo: float = 1e-6) -> VerificacaoInvariante:
    """FIM analítica contra oráculo de diferenças finitas de A(θ, φ) = b a^H"""
    geom_tx, geom_rx = montar_geometrias(cfg)
    pior = 0.0
    for _ in range(instancias):
        angulos = AngulosAlvo(
            rng.uniform(cfg.theta_min_rad, cfg.theta_max_rad),
            rng.uniform(cfg.phi_min_rad, min(cfg.phi_max_rad, np.pi / 2 - 2 * passo)),
        )
        ctx = criar_contexto_fim(cfg.com(theta_alvo_rad=angulos.theta, phi_alvo_rad=angulos.phi),
                                 geom_tx, geom_rx)
        R = _covariancia_aleatoria(geom_tx.n_elementos, rng)

        def A(theta: float, phi: float) -> np.ndarray:
            return np.outer(direcao_rx(geom_rx, theta), direcao_tx(geom_tx, AngulosAlvo(theta, phi)).conj())

        t, p = angulos.theta, angulos.phi
        dA = [(A(t + passo, p) - A(t - passo, p)) / (2 * passo),
              (A(t, p + passo) - A(t, p - passo)) / (2 * passo)]
        F_oraculo = np.array([
            [ctx.kappa * np.real(np.trace(dA[i] @ R @ dA[j].conj().T)) for j in range(2)]
            for i in range(2)
        ])
        pior = max(pior, _erro_relativo(calcular_fim(ctx, R).F, F_oraculo))
    return VerificacaoInvariante('fim_oraculo', pior < 1e-4, pior, 1e-4, f"{instancias} instâncias")


def verificar_linearidade_fim(cfg: ConfigCenario, rng: np.random.Generator) -> VerificacaoInvariante:
    """F(aR1 + bR2) = aF(R1) + bF(R2) e F ⪰ 0"""
    geom_tx, geom_rx = montar_geometrias(cfg)
    ctx = criar_contexto_fim(cfg, geom_tx, geom_rx)
    R1 = _covariancia_aleatoria(geom_tx.n_elementos, rng)
    R2 = _covariancia_aleatoria(geom_tx.n_elementos, rng)
    a, b = rng.uniform(0.1, 2.0, size=2)

    F1, F2 = calcular_fim(ctx, R1).F, calcular_fim(ctx, R2).F
    erro = _erro_relativo(calcular_fim(ctx, a * R1 + b * R2).F, a * F1 + b * F2)
    menor = min(np.linalg.eigvalsh(F1).min(), np.linalg.eigvalsh(F2).min()) / np.abs(F1).max()
    return VerificacaoInvariante('fim_linear_psd', erro < 1e-10 and menor > -1e-12, erro, 1e-10,
                                 f"menor autovalor relativo {menor:.3e}")


def verificar_schur(rng: np.random.Generator, instancias: int = 10,
                    backend: Optional[BackendCvxpy] = None) -> VerificacaoInvariante:
    """min Σt_i com blocos de Schur reproduz tr(F⁻¹)"""
    backend = backend or BackendCvxpy()
    pior = 0.0
    for _ in range(instancias):
        G = rng.standard_normal((2, 2))
        F = G @ G.T + 0.1 * np.eye(2)
        t = cp.Variable(2)
        programa = ProgramaConico(objetivo=cp.sum(t), variaveis={'t': t})
        entradas = [[F[0, 0], F[0, 1]], [F[1, 0], F[1, 1]]]
        for i in range(2):
            programa.adicionar('schur', bloco_schur(entradas, i, t[i]))
        solucao = resolver_subproblema(programa, backend)
        esperado = float(np.trace(np.linalg.inv(F)))
        pior = max(pior, abs(solucao.valor_objetivo - esperado) / esperado)
    return VerificacaoInvariante('schur_traco', pior < 1e-6, pior, 1e-6, f"{instancias} instâncias")


def verificar_otimizador(cfg: ConfigCenario, estrategia: Estrategia = Estrategia.RSMA) -> List[VerificacaoInvariante]:
    """Monotonicidade, posto um, viabilidade pós-extração e radar ≤ uniforme"""
    geom_tx, geom_rx = montar_geometrias(cfg)
    ctx = criar_contexto_fim(cfg, geom_tx, geom_rx)
    canal = gerar_canal(cfg)
    resultado = executar_sca(ctx, canal, cfg, estrategia)

    objetivos = [it.objetivo for it in resultado.historico if it.fase == MODO_CRB]
    subidas = [b - a for a, b in zip(objetivos, objetivos[1:])]
    pior_subida = max(subidas, default=0.0)
    verificacoes = [
        VerificacaoInvariante('sca_monotono', pior_subida <= cfg.tolerancia_violacao,
                              pior_subida, cfg.tolerancia_violacao),
        VerificacaoInvariante('posto_um', resultado.razao_posto >= cfg.razao_posto_min,
                              resultado.razao_posto, cfg.razao_posto_min),
        VerificacaoInvariante('potencia_por_feed', resultado.verificacao['potencia_ok'],
                              resultado.verificacao['desvio_potencia_max'], 0.01),
        VerificacaoInvariante('taxa_minima', resultado.verificacao['taxas_ok'],
                              resultado.verificacao['folga_taxa_min'], -0.01),
    ]

    radar = executar_sca(ctx, canal, cfg, Estrategia.RADAR)
    uniforme = calcular_crb(ctx, cfg.potencia_por_feed_mw * np.eye(cfg.n_feeds))
    verificacoes.append(VerificacaoInvariante(
        'radar_abaixo_uniforme', radar.crb.traco <= uniforme.traco * (1 + 1e-6),
        radar.crb.traco, uniforme.traco,
    ))
    verificacoes.append(VerificacaoInvariante(
        'radar_abaixo_dfrc', radar.crb.traco <= resultado.crb.traco * (1 + 1e-6),
        radar.crb.traco, resultado.crb.traco,
    ))
    return verificacoes


def executar_validacao(cfg: ConfigCenario, semente: int = 0, incluir_otimizador: bool = True,
                       saida: Optional[str] = None) -> List[VerificacaoInvariante]:
    """
    Executa a suíte de invariantes sobre um cenário

    Args:
        cfg: Cenário
        semente: Semente das instâncias aleatórias
        incluir_otimizador: Inclui as verificações que executam o SCA
        saida: Diretório para validacao.json (opcional)

    Returns:
        Lista de verificações
    """
    rng = np.random.default_rng(semente)
    verificacoes = [
        verificar_derivadas(cfg),
        verificar_fim(cfg, rng),
        verificar_linearidade_fim(cfg, rng),
        verificar_schur(rng, backend=BackendCvxpy(cfg.solver, cfg.tolerancia_violacao)),
    ]
    if incluir_otimizador:
        try:
            verificacoes.extend(verificar_otimizador(cfg))
        except ErroDFRC as e:
            verificacoes.append(VerificacaoInvariante('otimizador', False, float('nan'), 0.0, str(e)))

    for v in verificacoes:
        simbolo = '✓' if v.ok else '❌'
        logger.info(f"{simbolo} {v.nome}: {v.valor:.3e} (limite {v.limite:.1e}) {v.detalhe}")

    if saida:
        salvar_json({'hash_cenario': cfg.hash(), 'verificacoes': [v.to_dict() for v in verificacoes]},
                    os.path.join(saida, 'validacao.json'))
    return verificacoes
