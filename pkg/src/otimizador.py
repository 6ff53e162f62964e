"""
Otimizador DFRC: minimização do CRB sob restrições de taxa RSMA/SDMA

Trabalha em unidades normalizadas:
    P̃ = P/(P_t/N_t)            (restrição por feed: diag = 1)
    h̃_k = sqrt((P_t/N_t)/σ_k²)·h_k  (ruído unitário)
    F̃(R̃) = tr(C_unif)·F(R)     (Σt̃ ≈ 1 na covariância uniforme)

Cadeia de folgas (log natural):
    η_c,k − β_c,k >= ln2·Σ C_i          η_k − β_k >= ln2·r_k
    I + 1 <= e^{β^n}(β − β^n + 1)       τ <= S + 1
    ‖[τ + η − c_n, 2√τ^n]‖ <= τ − η + c_n,  c_n = ln τ^n + 1
"""

import time
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Any, List, Optional, Tuple

import numpy as np
import cvxpy as cp

from .canal import MatrizCanal, gerar_canal
from .cenario import ConfigCenario, Estrategia, montar_geometrias
from .crb import ContextoFim, ResultadoCrb, calcular_crb, criar_contexto_fim, matrizes_fim
from .excecoes import ErroInviabilidade, ErroInterno, ErroPostoUm, ErroRestricaoViolada, ErroSolver
from .programa_conico import (
    BackendConico,
    BackendCvxpy,
    ProgramaConico,
    bloco_schur,
    resolver_subproblema,
)
from .taxas import ConjuntoPrecoders, RelatorioTaxas, relatorio_taxas, sinr_comum

logger = logging.getLogger(__name__)

LN2 = np.log(2)
TAU_MIN = 1e-9
TRACO_DESPREZIVEL = 1e-6
PARCELA_DESPREZIVEL = 1e-5
MARGEM_MAX_MIN = 0.05
TOLERANCIA_MAX_MIN = 1e-3
TOLERANCIA_VERIFICACAO = 0.01

MODO_CRB = 'crb'
MODO_MAX_MIN = 'max_min'


@dataclass(frozen=True)
class ProblemaNormalizado:
    """Dados constantes do problema em unidades normalizadas"""
    Hn: np.ndarray
    M: Tuple[np.ndarray, np.ndarray, np.ndarray]
    coef: float
    escala_crb: float
    potencia_feed: float
    r_th: float
    estrategia: Estrategia

    @property
    def n_feeds(self) -> int:
        return self.Hn.shape[0]

    @property
    def n_usuarios(self) -> int:
        return self.Hn.shape[1]

    def fim(self, R: np.ndarray) -> np.ndarray:
        """F̃(R̃) numérica"""
        m_tt, m_tp, m_pp = self.M
        f = [np.real(np.trace(m @ R)) for m in (m_tt, m_tp, m_pp)]
        return self.coef * np.array([[f[0], f[1]], [f[1], f[2]]])


@dataclass
class EstadoSca:
    """
    Iterado do SCA em unidades normalizadas

    Para RADAR, P_k contém a única matriz R̃ e as folgas de taxa ficam vazias.
    """
    n: int
    P_c: np.ndarray
    P_k: np.ndarray
    eta_c: np.ndarray
    beta_c: np.ndarray
    tau_c: np.ndarray
    eta: np.ndarray
    beta: np.ndarray
    tau: np.ndarray
    C: np.ndarray
    r: np.ndarray
    t: np.ndarray
    objetivo: float
    lambda_pen: float

    def matrizes_elevadas(self, estrategia: Estrategia) -> List[np.ndarray]:
        if estrategia == Estrategia.RSMA:
            return [self.P_c] + list(self.P_k)
        return list(self.P_k)

    @property
    def covariancia(self) -> np.ndarray:
        return self.P_c + self.P_k.sum(axis=0)


@dataclass
class IteracaoSca:
    n: int
    fase: str
    objetivo: float
    penalidade: float
    razao_posto: float
    lambda_pen: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'fase': self.fase,
            'objetivo': self.objetivo,
            'penalidade': self.penalidade,
            'razao_posto': self.razao_posto,
            'lambda_pen': self.lambda_pen,
        }


@dataclass
class ResultadoOtimizacao:
    """Resultado completo de uma execução do otimizador"""
    estrategia: Estrategia
    r_th: float
    beamformers: ConjuntoPrecoders
    matrizes: Dict[str, np.ndarray]
    crb: ResultadoCrb
    taxas: Optional[RelatorioTaxas]
    historico: List[IteracaoSca]
    status: str
    objetivo: float
    verificacao: Dict[str, Any] = field(default_factory=dict)
    tempo_s: float = 0.0

    @property
    def n_iteracoes(self) -> int:
        return sum(1 for it in self.historico if it.fase == MODO_CRB)

    @property
    def razao_posto(self) -> float:
        if not self.historico:
            return 1.0
        return self.historico[-1].razao_posto

    def to_dict(self) -> Dict[str, Any]:
        return {
            'estrategia': self.estrategia.value,
            'r_th': self.r_th,
            'status': self.status,
            'n_iteracoes': self.n_iteracoes,
            'objetivo_normalizado': self.objetivo,
            'razao_posto': self.razao_posto,
            'crb': self.crb.to_dict(),
            'taxas': self.taxas.to_dict() if self.taxas else None,
            'beamformers': self.beamformers.to_dict(),
            'matrizes_elevadas': {
                nome: {'re': m.real.tolist(), 'im': m.imag.tolist()}
                for nome, m in self.matrizes.items()
            },
            'historico': [it.to_dict() for it in self.historico],
            'verificacao': self.verificacao,
            'tempo_s': self.tempo_s,
        }


# ----------------------------------------------------------------------
# Normalização e estado inicial
# ----------------------------------------------------------------------

def normalizar_problema(ctx: ContextoFim, canal: MatrizCanal, cfg: ConfigCenario,
                        estrategia: Estrategia, r_th: Optional[float] = None) -> ProblemaNormalizado:
    """
    Constrói o problema normalizado

    Raises:
        AlvoNaoIdentificavelError: FIM singular já na covariância uniforme
    """
    p0 = cfg.potencia_por_feed_mw
    n = cfg.n_feeds
    uniforme = calcular_crb(ctx, p0 * np.eye(n))
    return ProblemaNormalizado(
        Hn=canal.H * np.sqrt(p0 / cfg.ruido_mw),
        M=matrizes_fim(ctx),
        coef=ctx.kappa * p0 * uniforme.traco,
        escala_crb=uniforme.traco,
        potencia_feed=p0,
        r_th=cfg.r_th if r_th is None else r_th,
        estrategia=estrategia,
    )


def _recebidos(Hn: np.ndarray, P_c: np.ndarray, P_k: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """g[k, i] = h̃_k^H P̃_i h̃_k e gc[k] = h̃_k^H P̃_c h̃_k"""
    g = np.real(np.einsum('nk,inm,mk->ki', Hn.conj(), P_k, Hn))
    gc = np.real(np.einsum('nk,nm,mk->k', Hn.conj(), P_c, Hn))
    return g, gc


def _folgas_de_matrizes(Hn: np.ndarray, P_c: np.ndarray, P_k: np.ndarray) -> Dict[str, np.ndarray]:
    """Pontos de linearização exatos: β = ln(I+1), τ = S+1, η = ln τ"""
    g, gc = _recebidos(Hn, P_c, P_k)
    total = g.sum(axis=1)
    interferencia = total - np.diag(g)
    tau = total + 1
    tau_c = gc + total + 1
    return {
        'beta': np.log(interferencia + 1),
        'tau': tau,
        'eta': np.log(tau),
        'beta_c': np.log(total + 1),
        'tau_c': tau_c,
        'eta_c': np.log(tau_c),
    }


def _epigrafo(problema: ProblemaNormalizado, R: np.ndarray) -> np.ndarray:
    try:
        return np.diag(np.linalg.inv(problema.fim(R))).copy()
    except np.linalg.LinAlgError:
        return np.full(2, 1e12)


def razao_posto(P: np.ndarray) -> float:
    """λ_max/tr(P); matriz de traço desprezível conta como posto um"""
    traco = float(np.real(np.trace(P)))
    if traco < TRACO_DESPREZIVEL:
        return 1.0
    return float(np.linalg.eigvalsh(P)[-1] / traco)


def razao_posto_minima(matrizes: List[np.ndarray]) -> float:
    """
    Menor razão de posto entre as matrizes elevadas

    Fluxos com traço abaixo de PARCELA_DESPREZIVEL·Σtr (potência nula)
    contam como posto um: w = 0 é um beamformer válido.
    """
    total = sum(float(np.real(np.trace(P))) for P in matrizes)
    limite = max(PARCELA_DESPREZIVEL * total, TRACO_DESPREZIVEL)
    razoes = [razao_posto(P) for P in matrizes if float(np.real(np.trace(P))) >= limite]
    return min(razoes, default=1.0)


def _autovetor_dominante(P: np.ndarray) -> Tuple[float, np.ndarray]:
    valores, vetores = np.linalg.eigh(P)
    return float(max(valores[-1], 0.0)), vetores[:, -1]


def _penalidade(matrizes: List[np.ndarray]) -> float:
    return float(sum(np.real(np.trace(P)) - _autovetor_dominante(P)[0] for P in matrizes))


def inicializar(problema: ProblemaNormalizado, cfg: ConfigCenario) -> EstadoSca:
    """
    Estado inicial por filtro casado com projeção na potência por feed

    p_k = sqrt(P_t/K)·h_k/‖h_k‖; p_c (RSMA) na direção dominante de H com
    potência 1e-3·P_t/N_t; linhas reescaladas para diag(P P^H) = P_t/N_t.

    Returns:
        EstadoSca com folgas consistentes
    """
    n, k = problema.n_feeds, problema.n_usuarios
    vazio = np.zeros(k)

    if problema.estrategia == Estrategia.RADAR:
        R = np.eye(n, dtype=complex)
        t = _epigrafo(problema, R)
        return EstadoSca(
            n=0, P_c=np.zeros((n, n), dtype=complex), P_k=R[None], eta_c=vazio, beta_c=vazio,
            tau_c=vazio, eta=vazio, beta=vazio, tau=vazio, C=vazio, r=vazio, t=t,
            objetivo=float(t.sum()), lambda_pen=0.0,
        )

    Hn = problema.Hn
    privados = np.sqrt(n / k) * Hn / np.linalg.norm(Hn, axis=0)
    if problema.estrategia == Estrategia.RSMA:
        u, _, _ = np.linalg.svd(Hn, full_matrices=False)
        p_c = np.sqrt(cfg.fracao_comum_inicial) * u[:, 0]
    else:
        p_c = np.zeros(n, dtype=complex)

    P = np.column_stack([p_c, privados])
    diagonal = np.real(np.sum(np.abs(P) ** 2, axis=1))
    P = P / np.sqrt(np.maximum(diagonal, 1e-300))[:, None]
    p_c, privados = P[:, 0], P[:, 1:]

    P_c = np.outer(p_c, p_c.conj())
    P_k = np.einsum('nk,mk->knm', privados, privados.conj())
    folgas = _folgas_de_matrizes(Hn, P_c, P_k)

    g, gc = _recebidos(Hn, P_c, P_k)
    sinal = np.diag(g)
    r = np.log2(1 + sinal / (g.sum(axis=1) - sinal + 1))
    if problema.estrategia == Estrategia.RSMA:
        taxa_comum = float(np.min(np.log2(1 + gc / (g.sum(axis=1) + 1))))
        C = np.full(k, taxa_comum / k)
    else:
        C = vazio.copy()
        for chave in ('eta_c', 'beta_c', 'tau_c'):
            folgas[chave] = vazio.copy()

    t = _epigrafo(problema, P_c + P_k.sum(axis=0))
    estado = EstadoSca(
        n=0, P_c=P_c, P_k=P_k, C=C, r=r, t=t,
        objetivo=float(t.sum()), lambda_pen=cfg.lambda_pen_inicial, **folgas,
    )
    logger.debug(
        f"Estado inicial: taxas privadas {np.round(r, 3)}, Σt = {t.sum():.4f}"
    )
    return estado


# ----------------------------------------------------------------------
# Subproblema convexo
# ----------------------------------------------------------------------

def _restricao_log(eta, tau, tau_n: np.ndarray):
    """η <= ln τ^n + 1 − τ^n/τ na forma SOC hiperbólica (um cone por usuário)"""
    k = tau_n.shape[0]
    c_n = np.log(tau_n) + 1
    X = cp.vstack([
        cp.reshape(tau + eta - c_n, (1, k), order='F'),
        (2 * np.sqrt(tau_n)).reshape(1, k),
    ])
    return cp.SOC(tau - eta + c_n, X, axis=0)


def construir_subproblema(problema: ProblemaNormalizado, estado: EstadoSca,
                          modo: str = MODO_CRB) -> ProgramaConico:
    """
    Subproblema convexo linearizado no estado atual

    Args:
        problema: Dados normalizados
        estado: Ponto de linearização (τ, β, autovetores da penalidade)
        modo: 'crb' (Σt + penalidade) ou 'max_min' (−δ, sem CRB)

    Returns:
        ProgramaConico com grupos: schur, potencia_feed, psd, comum_nao_negativo,
        taxa_minima, taxa_comum, taxa_privada, interferencia, recebido, soc, tau_min
    """
    n, k = problema.n_feeds, problema.n_usuarios
    estrategia = problema.estrategia
    programa = ProgramaConico(objetivo=0)
    variaveis = programa.variaveis

    if estrategia == Estrategia.RADAR:
        R = cp.Variable((n, n), hermitian=True, name='R')
        variaveis['R'] = R
        matrizes = [R]
        P_c, P_k = None, []
    else:
        P_k = [cp.Variable((n, n), hermitian=True, name=f'P_{i}') for i in range(k)]
        for i, P in enumerate(P_k):
            variaveis[f'P_{i}'] = P
        matrizes = list(P_k)
        P_c = None
        if estrategia == Estrategia.RSMA:
            P_c = cp.Variable((n, n), hermitian=True, name='P_c')
            variaveis['P_c'] = P_c
            matrizes = [P_c] + matrizes

    total = matrizes[0]
    for P in matrizes[1:]:
        total = total + P
    programa.adicionar('potencia_feed', cp.real(cp.diag(total)) == 1)
    programa.adicionar('psd', [P >> 0 for P in matrizes])

    objetivo = 0
    if modo == MODO_CRB:
        t = cp.Variable(2, name='t')
        variaveis['t'] = t
        coef = problema.coef
        f_tt, f_tp, f_pp = (coef * cp.real(cp.trace(M @ total)) for M in problema.M)
        F = [[f_tt, f_tp], [f_tp, f_pp]]
        programa.adicionar('schur', [bloco_schur(F, i, t[i]) for i in range(2)])
        objetivo = cp.sum(t)

        if estrategia != Estrategia.RADAR:
            atuais = estado.matrizes_elevadas(estrategia)
            penalidade = 0
            for P, P_n in zip(matrizes, atuais):
                _, v = _autovetor_dominante(P_n)
                V = np.outer(v, v.conj())
                penalidade = penalidade + cp.real(cp.trace(P)) - cp.real(cp.trace(V @ P))
            objetivo = objetivo + estado.lambda_pen * penalidade

    if estrategia != Estrategia.RADAR:
        limite = problema.r_th
        if modo == MODO_MAX_MIN:
            delta = cp.Variable(name='delta')
            variaveis['delta'] = delta
            limite = delta
            objetivo = -delta
        _adicionar_cadeia_taxas(programa, problema, estado, P_c, P_k, limite)

    programa.objetivo = objetivo
    return programa


def _adicionar_cadeia_taxas(programa: ProgramaConico, problema: ProblemaNormalizado,
                            estado: EstadoSca, P_c, P_k: list, limite) -> None:
    Hn = problema.Hn
    k = problema.n_usuarios
    v = programa.variaveis

    # coluna i: h̃_j^H P̃_i h̃_j para todos os usuários j
    colunas = [cp.real(cp.diag(Hn.conj().T @ P_i @ Hn)) for P_i in P_k]
    identidade = np.eye(k)
    total = colunas[0]
    interferencia = cp.multiply(1 - identidade[0], colunas[0])
    for i in range(1, k):
        total = total + colunas[i]
        interferencia = interferencia + cp.multiply(1 - identidade[i], colunas[i])

    eta, beta, tau, r = (cp.Variable(k, name=nome) for nome in ('eta', 'beta', 'tau', 'r'))
    v.update({'eta': eta, 'beta': beta, 'tau': tau, 'r': r})

    programa.adicionar('taxa_privada', eta - beta >= LN2 * r)
    programa.adicionar('interferencia',
                       interferencia + 1 <= cp.multiply(np.exp(estado.beta), beta - estado.beta + 1))
    programa.adicionar('recebido', tau <= total + 1)
    programa.adicionar('soc', _restricao_log(eta, tau, estado.tau))
    programa.adicionar('tau_min', tau >= TAU_MIN)

    if problema.estrategia == Estrategia.RSMA:
        C = cp.Variable(k, name='C')
        eta_c, beta_c, tau_c = (cp.Variable(k, name=nome) for nome in ('eta_c', 'beta_c', 'tau_c'))
        v.update({'C': C, 'eta_c': eta_c, 'beta_c': beta_c, 'tau_c': tau_c})

        comum = cp.real(cp.diag(Hn.conj().T @ P_c @ Hn))
        programa.adicionar('comum_nao_negativo', C >= 0)
        programa.adicionar('taxa_minima', C + r >= limite)
        programa.adicionar('taxa_comum', eta_c - beta_c >= LN2 * cp.sum(C))
        programa.adicionar('interferencia',
                           total + 1 <= cp.multiply(np.exp(estado.beta_c), beta_c - estado.beta_c + 1))
        programa.adicionar('recebido', tau_c <= comum + total + 1)
        programa.adicionar('soc', _restricao_log(eta_c, tau_c, estado.tau_c))
        programa.adicionar('tau_min', tau_c >= TAU_MIN)
    else:
        programa.adicionar('taxa_minima', r >= limite)


def _hermitiana(valor: np.ndarray) -> np.ndarray:
    valor = np.asarray(valor, dtype=complex)
    return (valor + valor.conj().T) / 2


def _atualizar_estado(problema: ProblemaNormalizado, estado: EstadoSca,
                      valores: Dict[str, np.ndarray], objetivo: float) -> EstadoSca:
    """Novo iterado: matrizes e taxas do solver, pontos de linearização exatos"""
    n, k = problema.n_feeds, problema.n_usuarios
    vazio = np.zeros(k)

    if problema.estrategia == Estrategia.RADAR:
        R = _hermitiana(valores['R'])
        t = valores['t'] if 't' in valores else _epigrafo(problema, R)
        return replace(estado, n=estado.n + 1, P_k=R[None], t=np.asarray(t, dtype=float),
                       objetivo=objetivo)

    P_k = np.stack([_hermitiana(valores[f'P_{i}']) for i in range(k)])
    if problema.estrategia == Estrategia.RSMA:
        P_c = _hermitiana(valores['P_c'])
        C = np.asarray(valores['C'], dtype=float)
    else:
        P_c = np.zeros((n, n), dtype=complex)
        C = vazio.copy()

    folgas = _folgas_de_matrizes(problema.Hn, P_c, P_k)
    if problema.estrategia != Estrategia.RSMA:
        for chave in ('eta_c', 'beta_c', 'tau_c'):
            folgas[chave] = vazio.copy()

    t = valores['t'] if 't' in valores else _epigrafo(problema, P_c + P_k.sum(axis=0))
    return replace(
        estado, n=estado.n + 1, P_c=P_c, P_k=P_k, C=C,
        r=np.asarray(valores['r'], dtype=float), t=np.asarray(t, dtype=float),
        objetivo=objetivo, **folgas,
    )


def residuos_estado(problema: ProblemaNormalizado, estado: EstadoSca) -> Dict[str, float]:
    """
    Violação (>= 0) de cada grupo do subproblema CRB linearizado no próprio estado

    Returns:
        Dicionário grupo -> violação máxima
    """
    total = estado.covariancia
    residuos = {
        'potencia_feed': float(np.abs(np.real(np.diag(total)) - 1).max()),
        'psd': max(0.0, -min(float(np.linalg.eigvalsh(P)[0])
                             for P in estado.matrizes_elevadas(problema.estrategia))),
    }

    F = problema.fim(total)
    pior = 0.0
    for i in range(2):
        e = np.zeros(2)
        e[i] = 1.0
        bloco = np.block([[F, e[:, None]], [e[None, :], np.array([[estado.t[i]]])]])
        pior = max(pior, -float(np.linalg.eigvalsh(bloco)[0]))
    residuos['schur'] = max(0.0, pior)

    if problema.estrategia == Estrategia.RADAR:
        return residuos

    g, gc = _recebidos(problema.Hn, estado.P_c, estado.P_k)
    soma = g.sum(axis=1)
    interferencia = soma - np.diag(g)

    def positivo(x) -> float:
        return float(max(0.0, np.max(x)))

    residuos['taxa_privada'] = positivo(LN2 * estado.r - (estado.eta - estado.beta))
    residuos['interferencia'] = positivo(interferencia + 1 - np.exp(estado.beta))
    residuos['recebido'] = positivo(estado.tau - (soma + 1))
    residuos['soc'] = positivo(estado.eta - np.log(estado.tau))
    residuos['tau_min'] = positivo(TAU_MIN - estado.tau)

    if problema.estrategia == Estrategia.RSMA:
        residuos['comum_nao_negativo'] = positivo(-estado.C)
        residuos['taxa_minima'] = positivo(problema.r_th - estado.C - estado.r)
        residuos['taxa_comum'] = positivo(LN2 * estado.C.sum() - (estado.eta_c - estado.beta_c))
        residuos['interferencia'] = max(residuos['interferencia'],
                                        positivo(soma + 1 - np.exp(estado.beta_c)))
        residuos['recebido'] = max(residuos['recebido'], positivo(estado.tau_c - (gc + soma + 1)))
        residuos['soc'] = max(residuos['soc'], positivo(estado.eta_c - np.log(estado.tau_c)))
        residuos['tau_min'] = max(residuos['tau_min'], positivo(TAU_MIN - estado.tau_c))
    else:
        residuos['taxa_minima'] = positivo(problema.r_th - estado.r)

    return residuos


# ----------------------------------------------------------------------
# Laços
# ----------------------------------------------------------------------

def _resolver_ou_falhar(programa: ProgramaConico, backend: BackendConico, etapa: str):
    solucao = resolver_subproblema(programa, backend)
    if not solucao.otima:
        raise ErroInviabilidade(f"Subproblema {solucao.status} ({etapa})")
    return solucao


def _conferir_potencia_feed(estado: EstadoSca, tolerancia: float, etapa: str) -> None:
    """|diag(R̃) − 1| <= tolerância (absoluta, em unidades de P_t/N_t) em todo iterado aceito"""
    desvio = float(np.max(np.abs(np.real(np.diag(estado.covariancia)) - 1)))
    if desvio > tolerancia:
        raise ErroSolver(
            f"Potência por feed fora da tolerância {tolerancia:.1e} ({etapa})",
            {'potencia_feed': desvio},
        )


def _resolver_somente_radar(problema: ProblemaNormalizado, cfg: ConfigCenario,
                            backend: BackendConico) -> EstadoSca:
    estado = inicializar(problema, cfg)
    programa = construir_subproblema(problema, estado)
    solucao = _resolver_ou_falhar(programa, backend, "somente radar")
    estado = _atualizar_estado(problema, estado, solucao.valores, solucao.valor_objetivo)
    _conferir_potencia_feed(estado, cfg.tolerancia_violacao, "somente radar")
    return estado


def decompor_covariancia_radar(problema: ProblemaNormalizado, R: np.ndarray) -> Optional[EstadoSca]:
    """
    Distribui a covariância ótima somente radar entre fluxos de posto um

    Usada com R_th = 0, quando as restrições de taxa são vazias: cada
    autovetor significativo de R̃ vira um fluxo (p_c primeiro no RSMA) e as
    linhas são reescaladas para diag = 1.

    Args:
        problema: Problema RSMA ou SDMA normalizado
        R: Covariância somente radar normalizada

    Returns:
        EstadoSca com C = 0, ou None se o posto de R̃ excede o número de fluxos
    """
    n, k = problema.n_feeds, problema.n_usuarios
    n_fluxos = k + 1 if problema.estrategia == Estrategia.RSMA else k

    valores, vetores = np.linalg.eigh(R)
    ordem = np.argsort(valores)[::-1]
    valores, vetores = np.maximum(valores[ordem], 0.0), vetores[:, ordem]
    posto = int(np.sum(valores > PARCELA_DESPREZIVEL * valores.sum()))
    if posto > n_fluxos:
        logger.debug(f"Posto {posto} da covariância somente radar para {n_fluxos} fluxos")
        return None

    usados = min(n, n_fluxos)
    colunas = np.zeros((n, n_fluxos), dtype=complex)
    colunas[:, :usados] = vetores[:, :usados] * np.sqrt(valores[:usados])
    diagonal = np.sum(np.abs(colunas) ** 2, axis=1)
    colunas = colunas / np.sqrt(diagonal)[:, None]

    if problema.estrategia == Estrategia.RSMA:
        p_c, privados = colunas[:, 0], colunas[:, 1:]
    else:
        p_c, privados = np.zeros(n, dtype=complex), colunas

    P_c = np.outer(p_c, p_c.conj())
    P_k = np.einsum('nk,mk->knm', privados, privados.conj())
    folgas = _folgas_de_matrizes(problema.Hn, P_c, P_k)
    vazio = np.zeros(k)
    if problema.estrategia != Estrategia.RSMA:
        for chave in ('eta_c', 'beta_c', 'tau_c'):
            folgas[chave] = vazio.copy()

    g, _ = _recebidos(problema.Hn, P_c, P_k)
    sinal = np.diag(g)
    r = np.log2(1 + sinal / (g.sum(axis=1) - sinal + 1))
    t = _epigrafo(problema, P_c + P_k.sum(axis=0))
    return EstadoSca(
        n=1, P_c=P_c, P_k=P_k, C=vazio.copy(), r=r, t=t,
        objetivo=float(t.sum()), lambda_pen=0.0, **folgas,
    )


def refinar_max_min(problema: ProblemaNormalizado, estado: EstadoSca, cfg: ConfigCenario,
                    backend: BackendConico,
                    historico: Optional[List[IteracaoSca]] = None) -> EstadoSca:
    """
    Refina o estado inicial com SCA de taxa max-min (apenas comunicação)

    Para ao atingir δ >= R_th + 0.05, quando Δδ < 1e-3 ou no limite de iterações.

    Raises:
        ErroInviabilidade: δ final abaixo de R_th
    """
    alvo = problema.r_th + MARGEM_MAX_MIN
    delta_anterior = None
    delta = -np.inf

    for i in range(1, cfg.max_iteracoes_max_min + 1):
        programa = construir_subproblema(problema, estado, MODO_MAX_MIN)
        solucao = _resolver_ou_falhar(programa, backend, f"max-min, iteração {i}")
        delta = float(solucao.valores['delta'])
        estado = _atualizar_estado(problema, estado, solucao.valores, -delta)
        _conferir_potencia_feed(estado, cfg.tolerancia_violacao, f"max-min, iteração {i}")

        if historico is not None:
            historico.append(IteracaoSca(
                n=i, fase=MODO_MAX_MIN, objetivo=-delta, penalidade=0.0,
                razao_posto=razao_posto_minima(estado.matrizes_elevadas(problema.estrategia)),
                lambda_pen=0.0,
            ))
        logger.debug(f"Max-min iteração {i}: δ = {delta:.4f} bps/Hz")

        if delta >= alvo:
            break
        if delta_anterior is not None and abs(delta - delta_anterior) < TOLERANCIA_MAX_MIN:
            break
        delta_anterior = delta

    if delta < problema.r_th:
        raise ErroInviabilidade(
            f"R_th = {problema.r_th} bps/Hz inatingível: melhor taxa max-min {delta:.4f} bps/Hz"
        )

    # t e objetivo coerentes com o problema CRB
    estado.t = _epigrafo(problema, estado.covariancia)
    estado.objetivo = float(estado.t.sum())
    logger.info(f"Inicialização max-min concluída: δ = {delta:.4f} bps/Hz")
    return estado


def extrair_beamformers(estado: EstadoSca, problema: ProblemaNormalizado) -> ConjuntoPrecoders:
    """
    Beamformers p = sqrt(λ_max·P_t/N_t)·v_max das matrizes elevadas

    RADAR: fatoração completa de R̃ (N_t colunas privadas, p_c = 0).
    Fluxos de potência desprezível saem como p = 0.
    """
    p0 = problema.potencia_feed
    n = problema.n_feeds

    if problema.estrategia == Estrategia.RADAR:
        valores, vetores = np.linalg.eigh(estado.P_k[0])
        ordem = np.argsort(valores)[::-1]
        colunas = vetores[:, ordem] * np.sqrt(np.maximum(valores[ordem], 0.0) * p0)
        return ConjuntoPrecoders(np.zeros(n, dtype=complex), colunas, Estrategia.RADAR)

    limite = PARCELA_DESPREZIVEL * float(np.real(np.trace(estado.covariancia)))

    def fator(P: np.ndarray) -> np.ndarray:
        if float(np.real(np.trace(P))) < max(limite, TRACO_DESPREZIVEL):
            return np.zeros(n, dtype=complex)
        lam, v = _autovetor_dominante(P)
        return np.sqrt(lam * p0) * v

    privados = np.column_stack([fator(P) for P in estado.P_k])
    if problema.estrategia == Estrategia.RSMA:
        p_c = fator(estado.P_c)
    else:
        p_c = np.zeros(n, dtype=complex)
    return ConjuntoPrecoders(p_c, privados, problema.estrategia)


def _verificar(problema: ProblemaNormalizado, estado: EstadoSca, bf: ConjuntoPrecoders,
               canal: MatrizCanal, cfg: ConfigCenario) -> Tuple[Optional[RelatorioTaxas], Dict[str, Any]]:
    """
    Verificação exata após a extração de posto um

    Raises:
        ErroRestricaoViolada: taxa total de algum usuário abaixo de R_th − 0.01
    """
    potencia = np.real(np.diag(bf.covariancia))
    desvio = float(np.max(np.abs(potencia - problema.potencia_feed)) / problema.potencia_feed)
    verificacao: Dict[str, Any] = {
        'desvio_potencia_max': desvio,
        'potencia_ok': desvio <= TOLERANCIA_VERIFICACAO,
    }
    if not verificacao['potencia_ok']:
        logger.warning(f"Potência por feed fora de 1%: desvio {desvio:.4f}")

    if problema.estrategia == Estrategia.RADAR:
        return None, verificacao

    C = np.maximum(estado.C, 0.0)
    excesso = 0.0
    if problema.estrategia == Estrategia.RSMA:
        taxa_comum = float(np.min(np.log2(1 + sinr_comum(canal.H, bf, cfg.ruido_mw))))
        excesso = float(C.sum() - taxa_comum)
        if excesso > 0:
            if excesso > TOLERANCIA_VERIFICACAO:
                logger.warning(f"Σ C_k excede a taxa comum em {excesso:.4f} bps/Hz após extração")
            C = C * (taxa_comum / C.sum()) if C.sum() > 0 else C

    taxas = relatorio_taxas(canal.H, bf, cfg.ruido_mw, C)
    folgas = taxas.taxas_totais - problema.r_th
    folga = float(np.min(folgas))
    verificacao.update({
        'excesso_comum': excesso,
        'folga_taxa_min': folga,
        'taxas_ok': folga >= -TOLERANCIA_VERIFICACAO and excesso <= TOLERANCIA_VERIFICACAO,
    })
    if folga < -TOLERANCIA_VERIFICACAO:
        usuario = int(np.argmin(folgas))
        raise ErroRestricaoViolada(
            usuario,
            f"taxa total {taxas.taxas_totais[usuario]:.4f} bps/Hz abaixo de "
            f"R_th = {problema.r_th} bps/Hz após a extração de posto um"
        )
    return taxas, verificacao


def _finalizar(problema: ProblemaNormalizado, estado: EstadoSca, ctx: ContextoFim,
               canal: MatrizCanal, cfg: ConfigCenario, historico: List[IteracaoSca],
               status: str, inicio: float) -> ResultadoOtimizacao:
    bf = extrair_beamformers(estado, problema)
    crb = calcular_crb(ctx, bf.covariancia)
    taxas, verificacao = _verificar(problema, estado, bf, canal, cfg)

    p0 = problema.potencia_feed
    if problema.estrategia == Estrategia.RADAR:
        matrizes = {'R': estado.P_k[0] * p0}
    else:
        matrizes = {f'P_{i}': P * p0 for i, P in enumerate(estado.P_k)}
        if problema.estrategia == Estrategia.RSMA:
            matrizes['P_c'] = estado.P_c * p0
        penalidade = _penalidade(estado.matrizes_elevadas(problema.estrategia))
        verificacao['penalidade_final'] = penalidade
        verificacao['penalidade_relativa'] = penalidade / max(float(estado.t.sum()), 1e-300)

    resultado = ResultadoOtimizacao(
        estrategia=problema.estrategia,
        r_th=problema.r_th,
        beamformers=bf,
        matrizes=matrizes,
        crb=crb,
        taxas=taxas,
        historico=historico,
        status=status,
        objetivo=estado.objetivo,
        verificacao=verificacao,
        tempo_s=time.perf_counter() - inicio,
    )
    logger.info(
        f"Otimização {problema.estrategia.value} ({status}): "
        f"RCRB θ = {crb.rcrb_theta_graus:.4e}°, φ = {crb.rcrb_phi_graus:.4e}°, "
        f"{resultado.n_iteracoes} iteração(ões)"
    )
    return resultado


def executar_sca(ctx: ContextoFim, canal: MatrizCanal, cfg: ConfigCenario,
                 estrategia: Estrategia, r_th: Optional[float] = None,
                 backend: Optional[BackendConico] = None) -> ResultadoOtimizacao:
    """
    Executa o SCA completo com escalonamento da penalidade de posto um

    Args:
        ctx: Contexto da FIM
        canal: Canal de comunicação
        cfg: Cenário (tolerâncias e limites)
        estrategia: RSMA, SDMA ou RADAR
        r_th: Taxa mínima (padrão cfg.r_th)
        backend: Backend cônico (padrão BackendCvxpy)

    Returns:
        ResultadoOtimizacao

    Raises:
        ErroInviabilidade: subproblema inviável ou R_th inatingível
        ErroInterno: objetivo crescente (além de tolerancia_violacao) entre iterações
        ErroPostoUm: razão de posto abaixo do mínimo com λ_pen no teto
        ErroSolver: iterado fora da potência por feed
        ErroRestricaoViolada: taxa abaixo de R_th após a extração
    """
    inicio = time.perf_counter()
    backend = backend or BackendCvxpy(cfg.solver, cfg.tolerancia_violacao)
    problema = normalizar_problema(ctx, canal, cfg, estrategia, r_th)
    historico: List[IteracaoSca] = []

    logger.info(
        f"Iniciando otimização {estrategia.value}: N_t={problema.n_feeds}, "
        f"K={problema.n_usuarios}, R_th={problema.r_th} bps/Hz"
    )

    if estrategia == Estrategia.RADAR:
        estado = _resolver_somente_radar(problema, cfg, backend)
        historico.append(IteracaoSca(1, MODO_CRB, estado.objetivo, 0.0, 1.0, 0.0))
        return _finalizar(problema, estado, ctx, canal, cfg, historico, 'convergiu', inicio)

    if problema.r_th <= 0:
        radar = _resolver_somente_radar(replace(problema, estrategia=Estrategia.RADAR), cfg, backend)
        decomposto = decompor_covariancia_radar(problema, radar.P_k[0])
        if decomposto is not None:
            logger.info("R_th = 0: covariância somente radar decomposta em fluxos de posto um")
            historico.append(IteracaoSca(1, MODO_CRB, decomposto.objetivo, 0.0, 1.0, 0.0))
            return _finalizar(problema, decomposto, ctx, canal, cfg, historico, 'convergiu', inicio)
        logger.info("Posto da covariância somente radar excede os fluxos disponíveis; seguindo com o SCA")

    estado = inicializar(problema, cfg)

    if cfg.inicializacao == 'max_min':
        estado = refinar_max_min(problema, estado, cfg, backend, historico)

    status = 'limite_iteracoes'
    referencia: Optional[float] = None
    for n in range(1, cfg.max_iteracoes + 1):
        programa = construir_subproblema(problema, estado, MODO_CRB)
        solucao = _resolver_ou_falhar(programa, backend, f"iteração {n}")
        novo = _atualizar_estado(problema, estado, solucao.valores, solucao.valor_objetivo)
        _conferir_potencia_feed(novo, cfg.tolerancia_violacao, f"iteração {n}")

        matrizes = novo.matrizes_elevadas(estrategia)
        razao = razao_posto_minima(matrizes)
        penalidade = _penalidade(matrizes)
        historico.append(IteracaoSca(n, MODO_CRB, novo.objetivo, penalidade, razao, novo.lambda_pen))
        logger.debug(
            f"Iteração {n}: objetivo={novo.objetivo:.8f} Σt={novo.t.sum():.8f} "
            f"penalidade={penalidade:.3e} razão de posto={razao:.6f} λ={novo.lambda_pen:g}"
        )

        if referencia is not None:
            if novo.objetivo > referencia + cfg.tolerancia_violacao:
                raise ErroInterno(
                    f"Objetivo SCA cresceu na iteração {n}: {referencia:.10f} -> {novo.objetivo:.10f}"
                )
            if abs(novo.objetivo - referencia) < cfg.epsilon:
                if razao >= cfg.razao_posto_min:
                    estado = novo
                    status = 'convergiu'
                    break
                if novo.lambda_pen >= cfg.lambda_pen_max:
                    raise ErroPostoUm(razao)
                novo.lambda_pen = min(novo.lambda_pen * cfg.fator_lambda_pen, cfg.lambda_pen_max)
                logger.info(
                    f"Convergência com razão de posto {razao:.6f}: λ_pen elevado para {novo.lambda_pen:g}"
                )
                estado = novo
                referencia = None
                continue

        referencia = novo.objetivo
        estado = novo

    if status != 'convergiu':
        logger.warning(f"Limite de {cfg.max_iteracoes} iterações atingido sem convergência")
        razao = razao_posto_minima(estado.matrizes_elevadas(estrategia))
        if razao < cfg.razao_posto_min:
            raise ErroPostoUm(razao, f"Limite de iterações com razão de posto {razao:.6f}")

    return _finalizar(problema, estado, ctx, canal, cfg, historico, status, inicio)


def otimizar_cenario(cfg: ConfigCenario, estrategia: Estrategia,
                     r_th: Optional[float] = None,
                     backend: Optional[BackendConico] = None) -> ResultadoOtimizacao:
    """Geometrias, canal (semente do cenário) e SCA em uma chamada"""
    geom_tx, geom_rx = montar_geometrias(cfg)
    ctx = criar_contexto_fim(cfg, geom_tx, geom_rx)
    canal = gerar_canal(cfg)
    return executar_sca(ctx, canal, cfg, estrategia, r_th, backend)
