"""
Estimação no receptor radar: Capon, α̂ em forma fechada, Doppler por FFT
e busca angular 2-D
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Any, Optional, Tuple

import numpy as np
from scipy import linalg

from .arranjos import (
    GeometriaArranjo,
    AngulosAlvo,
    direcao_rx,
    direcao_tx,
    matriz_direcao_rx,
    matriz_direcao_tx,
)
from .cenario import ConfigCenario
from .excecoes import ArgumentoInvalidoError, DirecaoInobservavelError, ErroNumerico
from .sinais import ConjuntoEco
from .utils import salvar_csv, salvar_json

logger = logging.getLogger(__name__)

LIMIAR_DENOMINADOR = 1e-12
CONDICAO_MAXIMA = 1e15


@dataclass(frozen=True)
class GradeAngular:
    """
    Grade de busca (radianos) com o mesmo passo em θ e φ
    """
    theta_min: float
    theta_max: float
    phi_min: float
    phi_max: float
    passo: float

    def __post_init__(self):
        if not self.passo > 0:
            raise ArgumentoInvalidoError(f"Passo da grade deve ser positivo: {self.passo}")
        if not (0 <= self.theta_min <= self.theta_max < 2 * np.pi):
            raise ArgumentoInvalidoError("Faixa de θ deve estar contida em [0, 2π)")
        if not (0 < self.phi_min <= self.phi_max <= np.pi / 2 + 1e-12):
            raise ArgumentoInvalidoError("Faixa de φ deve estar contida em (0, π/2]")

    @classmethod
    def de_config(cls, cfg: ConfigCenario, passo: Optional[float] = None) -> 'GradeAngular':
        return cls(cfg.theta_min_rad, cfg.theta_max_rad, cfg.phi_min_rad,
                   cfg.phi_max_rad, cfg.passo_grade_rad if passo is None else passo)

    @staticmethod
    def _pontos(inicio: float, fim: float, passo: float) -> np.ndarray:
        n = int(np.floor((fim - inicio) / passo + 1e-9)) + 1
        return inicio + passo * np.arange(n)

    @property
    def thetas(self) -> np.ndarray:
        return self._pontos(self.theta_min, self.theta_max, self.passo)

    @property
    def phis(self) -> np.ndarray:
        return self._pontos(self.phi_min, self.phi_max, self.passo)

    def refinada(self, theta: float, phi: float, passo: float) -> 'GradeAngular':
        """Janela de ± um passo grosso em torno de (θ, φ), limitada à grade"""
        return GradeAngular(
            theta_min=max(self.theta_min, theta - self.passo),
            theta_max=min(self.theta_max, theta + self.passo),
            phi_min=max(self.phi_min, phi - self.passo),
            phi_max=min(self.phi_max, phi + self.passo),
            passo=passo,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'theta_min_graus': float(np.degrees(self.theta_min)),
            'theta_max_graus': float(np.degrees(self.theta_max)),
            'phi_min_graus': float(np.degrees(self.phi_min)),
            'phi_max_graus': float(np.degrees(self.phi_max)),
            'passo_graus': float(np.degrees(self.passo)),
            'n_theta': int(self.thetas.size),
            'n_phi': int(self.phis.size),
        }


@dataclass
class ResultadoEstimacao:
    """Estimativas e espectro |α̂(θ, φ)|² da busca grossa"""
    theta: float
    phi: float
    doppler_hz: float
    alpha: complex
    espectro: np.ndarray
    grade: GradeAngular
    grade_refino: Optional[GradeAngular] = None
    frequencias_doppler: Optional[np.ndarray] = field(default=None, repr=False)
    espectro_doppler: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def razao_pico_mediana(self) -> float:
        return razao_pico_mediana(self.espectro)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'theta_graus': float(np.degrees(self.theta)),
            'phi_graus': float(np.degrees(self.phi)),
            'doppler_hz': self.doppler_hz,
            'alpha': {'re': float(np.real(self.alpha)), 'im': float(np.imag(self.alpha))},
            'razao_pico_mediana': self.razao_pico_mediana,
            'grade': self.grade.to_dict(),
            'grade_refino': self.grade_refino.to_dict() if self.grade_refino else None,
        }


def covariancia_amostral(Z: np.ndarray) -> np.ndarray:
    """
    R_Z = (1/n) Σ z z^H sobre as colunas de Z

    Returns:
        Matriz N_r × N_r hermitiana PSD
    """
    n_rx, n_colunas = Z.shape
    if n_colunas < n_rx:
        logger.warning(f"Apenas {n_colunas} snapshots para {n_rx} elementos: R_Z mal condicionada")
    R = Z @ Z.conj().T / n_colunas
    return (R + R.conj().T) / 2


def _carregar(R: np.ndarray, carga: float) -> np.ndarray:
    n = R.shape[0]
    return R + carga * np.real(np.trace(R)) / n * np.eye(n)


def _resolver_carregada(R: np.ndarray, B: np.ndarray, carga: float) -> np.ndarray:
    R_l = _carregar(R, carga)
    if not np.all(np.isfinite(R_l)) or not np.linalg.cond(R_l) < CONDICAO_MAXIMA:
        raise ErroNumerico("R_Z singular mesmo após carga diagonal")
    try:
        return linalg.solve(R_l, B, assume_a='her')
    except (linalg.LinAlgError, ValueError) as e:
        raise ErroNumerico(f"Falha ao inverter R_Z: {e}") from e


def peso_capon(R_Z: np.ndarray, theta: float, geom_rx: GeometriaArranjo,
               carga: float = 1e-4) -> np.ndarray:
    """
    w = R⁻¹ b(θ) / (b^H R⁻¹ b), com carga diagonal δ·tr(R)/N_r

    Raises:
        ErroNumerico: R_Z singular após a carga
    """
    b = direcao_rx(geom_rx, theta)
    Rb = _resolver_carregada(R_Z, b, carga)
    return Rb / (b.conj() @ Rb)


def _pesos_capon(R_Z: np.ndarray, thetas: np.ndarray, geom_rx: GeometriaArranjo,
                 carga: float) -> np.ndarray:
    """Pesos de Capon para vários θ (colunas)"""
    B = matriz_direcao_rx(geom_rx, thetas)
    RB = _resolver_carregada(R_Z, B, carga)
    return RB / np.sum(B.conj() * RB, axis=0)


def espectro_doppler(conjunto: ConjuntoEco, n_fft: int,
                     modo: str = 'lento') -> Tuple[np.ndarray, np.ndarray]:
    """
    Espectro de magnitude usado na estimativa de Doppler

    literal: soma Z nos elementos, FFT de n_fft pontos das M amostras de cada
        símbolo, acumulação coerente em l; frequências pela taxa 1/T_s.
    lento: uma amostra por símbolo (média das M amostras da soma nos
        elementos) demodulada pela soma de X nos feeds; FFT em l com
        período T.

    Returns:
        (frequências em Hz, magnitude), ordenados por frequência
    """
    M = conjunto.amostras_por_simbolo
    L = conjunto.n_simbolos
    if n_fft < M:
        raise ArgumentoInvalidoError(f"N_fft ({n_fft}) deve ser >= M_symb ({M})")

    soma = conjunto.Z.sum(axis=0).reshape(L, M)
    if modo == 'literal':
        espectros = np.fft.fft(soma, n=n_fft, axis=1)
        magnitude = np.abs(espectros.sum(axis=0))
        frequencias = np.fft.fftfreq(n_fft, conjunto.periodo_amostra_s)
    elif modo == 'lento':
        referencia = conjunto.X.sum(axis=0).reshape(L, M).mean(axis=1)
        lento = soma.mean(axis=1) * referencia.conj()
        n = max(n_fft, L)
        magnitude = np.abs(np.fft.fft(lento, n=n))
        frequencias = np.fft.fftfreq(n, conjunto.periodo_simbolo_s)
    else:
        raise ArgumentoInvalidoError(f"Modo Doppler desconhecido: {modo}")

    ordem = np.argsort(frequencias, kind='stable')
    return frequencias[ordem], magnitude[ordem]


def largura_bin_doppler(conjunto: ConjuntoEco, n_fft: int, modo: str = 'lento') -> float:
    """Resolução em Hz do espectro Doppler"""
    if modo == 'literal':
        return 1.0 / (n_fft * conjunto.periodo_amostra_s)
    return 1.0 / (max(n_fft, conjunto.n_simbolos) * conjunto.periodo_simbolo_s)


def acerto_doppler(doppler_estimado_hz: float, doppler_real_hz: float, largura_hz: float) -> bool:
    """
    Critério de acerto do Doppler

    O erro deve ficar dentro de min(largura do bin, |F_D|/2). Um bin mais
    largo que |F_D| não separa o alvo da frequência zero e nunca acerta.
    """
    alvo = abs(doppler_real_hz)
    erro = abs(doppler_estimado_hz - doppler_real_hz)
    if alvo == 0.0:
        return bool(erro <= largura_hz * (1 + 1e-9))
    if largura_hz > alvo:
        return False
    return bool(erro <= min(largura_hz, alvo / 2) * (1 + 1e-9))


def estimar_doppler(conjunto: ConjuntoEco, n_fft: int, modo: str = 'lento') -> float:
    """F̂_D: frequência do bin de pico do espectro Doppler"""
    frequencias, magnitude = espectro_doppler(conjunto, n_fft, modo)
    return float(frequencias[np.argmax(magnitude)])


def _por_simbolo(conjunto: ConjuntoEco, doppler_hz: float) -> Tuple[np.ndarray, np.ndarray]:
    """Z desrotacionado na taxa de amostragem e média por símbolo; X médio por símbolo"""
    M, L = conjunto.amostras_por_simbolo, conjunto.n_simbolos
    indices = np.arange(1, conjunto.n_amostras + 1)
    desrotacao = np.exp(-1j * 2 * np.pi * doppler_hz * indices * conjunto.periodo_amostra_s)
    Z_sim = (conjunto.Z * desrotacao).reshape(conjunto.Z.shape[0], L, M).mean(axis=2)
    X_sim = conjunto.X.reshape(conjunto.X.shape[0], L, M).mean(axis=2)
    return Z_sim, X_sim


def estimar_alpha(conjunto: ConjuntoEco, angulos: AngulosAlvo, doppler_hz: float,
                  geom_tx: GeometriaArranjo, geom_rx: GeometriaArranjo,
                  carga: float = 1e-4, R_Z: Optional[np.ndarray] = None) -> complex:
    """
    α̂ = Σ_l (w^H z̃_l)·conj(a^H x_l) / Σ_l |a^H x_l|²

    Raises:
        DirecaoInobservavelError: a(θ,φ) fora do espaço transmitido
    """
    Z_sim, X_sim = _por_simbolo(conjunto, doppler_hz)
    R_Z = covariancia_amostral(conjunto.Z) if R_Z is None else R_Z
    w = peso_capon(R_Z, angulos.theta, geom_rx, carga)

    g = direcao_tx(geom_tx, angulos).conj() @ X_sim
    denominador = float(np.sum(np.abs(g) ** 2))
    if denominador <= LIMIAR_DENOMINADOR * float(np.sum(np.abs(X_sim) ** 2)):
        raise DirecaoInobservavelError(
            f"Direção (θ={np.degrees(angulos.theta):.2f}°, φ={np.degrees(angulos.phi):.2f}°) "
            "fora do espaço transmitido"
        )
    return complex(np.sum((w.conj() @ Z_sim) * g.conj()) / denominador)


def _superficie(Z_sim: np.ndarray, X_sim: np.ndarray, R_Z: np.ndarray, grade: GradeAngular,
                geom_tx: GeometriaArranjo, geom_rx: GeometriaArranjo,
                carga: float) -> Tuple[np.ndarray, np.ndarray]:
    """|α̂|² e α̂ em toda a grade, vetorizado por θ"""
    thetas, phis = grade.thetas, grade.phis
    W = _pesos_capon(R_Z, thetas, geom_rx, carga)
    saidas = W.conj().T @ Z_sim                    # n_theta × L
    energia_x = float(np.sum(np.abs(X_sim) ** 2))

    alphas = np.zeros((thetas.size, phis.size), dtype=complex)
    for i, theta in enumerate(thetas):
        A = matriz_direcao_tx(geom_tx, np.full(phis.size, theta), phis)
        G = A.conj().T @ X_sim                     # n_phi × L
        denominadores = np.sum(np.abs(G) ** 2, axis=1)
        numeradores = G.conj() @ saidas[i]
        validos = denominadores > LIMIAR_DENOMINADOR * energia_x
        alphas[i, validos] = numeradores[validos] / denominadores[validos]
    return np.abs(alphas) ** 2, alphas


def busca_angular(conjunto: ConjuntoEco, doppler_hz: float, grade: GradeAngular,
                  geom_tx: GeometriaArranjo, geom_rx: GeometriaArranjo,
                  carga: float = 1e-4, passo_refino: float = 0.0) -> ResultadoEstimacao:
    """
    Busca 2-D de max |α̂(θ, φ)|² com F̂_D fixo

    Args:
        conjunto: CPI
        doppler_hz: F̂_D
        grade: Grade grossa
        geom_tx, geom_rx: Geometrias
        carga: Carga diagonal de R_Z
        passo_refino: Passo da grade fina em torno do pico (0 desativa)

    Returns:
        ResultadoEstimacao com o espectro da grade grossa
    """
    Z_sim, X_sim = _por_simbolo(conjunto, doppler_hz)
    R_Z = covariancia_amostral(conjunto.Z)

    espectro, alphas = _superficie(Z_sim, X_sim, R_Z, grade, geom_tx, geom_rx, carga)
    i, j = np.unravel_index(np.argmax(espectro), espectro.shape)
    theta, phi, alpha = grade.thetas[i], grade.phis[j], alphas[i, j]

    grade_refino = None
    if passo_refino > 0 and passo_refino < grade.passo:
        grade_refino = grade.refinada(theta, phi, passo_refino)
        fino, alphas_finos = _superficie(Z_sim, X_sim, R_Z, grade_refino, geom_tx, geom_rx, carga)
        i, j = np.unravel_index(np.argmax(fino), fino.shape)
        theta, phi, alpha = grade_refino.thetas[i], grade_refino.phis[j], alphas_finos[i, j]

    logger.debug(
        f"Busca angular: θ̂={np.degrees(theta):.3f}°, φ̂={np.degrees(phi):.3f}°, |α̂|²={abs(alpha) ** 2:.4e}"
    )
    return ResultadoEstimacao(
        theta=float(theta),
        phi=float(phi),
        doppler_hz=doppler_hz,
        alpha=complex(alpha),
        espectro=espectro,
        grade=grade,
        grade_refino=grade_refino,
    )


def estimar(conjunto: ConjuntoEco, cfg: ConfigCenario,
            geometrias: Tuple[GeometriaArranjo, GeometriaArranjo],
            passo_grade: Optional[float] = None) -> ResultadoEstimacao:
    """Procedimento em dois estágios: Doppler por FFT e busca angular 2-D"""
    geom_tx, geom_rx = geometrias
    frequencias, magnitude = espectro_doppler(conjunto, cfg.n_fft, cfg.modo_doppler)
    doppler = float(frequencias[np.argmax(magnitude)])

    grade = GradeAngular.de_config(cfg, passo_grade)
    resultado = busca_angular(conjunto, doppler, grade, geom_tx, geom_rx,
                              cfg.carga_diagonal, cfg.passo_refino_rad)
    resultado.frequencias_doppler = frequencias
    resultado.espectro_doppler = magnitude
    return resultado


def razao_pico_mediana(espectro: np.ndarray) -> float:
    """max/mediana da superfície |α̂|² (nitidez do pico)"""
    mediana = float(np.median(espectro))
    if mediana <= 0:
        return float('inf')
    return float(np.max(espectro) / mediana)


def salvar_espectro_csv(resultado: ResultadoEstimacao, caminho: str) -> None:
    """Superfície (θ, φ, potência) em graus, uma linha por célula"""
    thetas = np.degrees(resultado.grade.thetas)
    phis = np.degrees(resultado.grade.phis)
    linhas = (
        {'theta_graus': float(thetas[i]), 'phi_graus': float(phis[j]),
         'potencia': float(resultado.espectro[i, j])}
        for i in range(thetas.size) for j in range(phis.size)
    )
    salvar_csv(linhas, caminho, ['theta_graus', 'phi_graus', 'potencia'])


def salvar_espectro_doppler_csv(resultado: ResultadoEstimacao, caminho: str) -> None:
    """Magnitude do espectro Doppler por frequência"""
    if resultado.frequencias_doppler is None:
        raise ArgumentoInvalidoError("Resultado sem espectro Doppler")
    linhas = (
        {'frequencia_hz': float(f), 'magnitude': float(m)}
        for f, m in zip(resultado.frequencias_doppler, resultado.espectro_doppler)
    )
    salvar_csv(linhas, caminho, ['frequencia_hz', 'magnitude'])


def salvar_grade_json(resultado: ResultadoEstimacao, caminho: str) -> None:
    salvar_json(resultado.to_dict(), caminho)
