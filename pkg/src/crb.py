"""
Matriz de informação de Fisher e limite de Cramér-Rao de (θ, φ)

F_ij = (2|α|²L/σ_m²)·Re{tr(∂A/∂ξ_i · R_X · ∂A/∂ξ_j^H)},  A = b(θ) a^H(θ, φ)
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Any, Tuple

import numpy as np

from .arranjos import (
    GeometriaArranjo,
    AngulosAlvo,
    direcao_tx,
    direcao_rx,
    derivadas_direcao_tx,
    derivada_direcao_rx,
)
from .cenario import ConfigCenario
from .excecoes import ArgumentoInvalidoError, AlvoNaoIdentificavelError

logger = logging.getLogger(__name__)

TOLERANCIA_HERMITIANA = 1e-8
CONDICAO_MAXIMA = 1e12


@dataclass(frozen=True)
class ContextoFim:
    """
    Dados fixos da FIM: geometrias, ângulos, |α|², L, σ_m² e derivadas de A
    """
    geom_tx: GeometriaArranjo
    geom_rx: GeometriaArranjo
    angulos: AngulosAlvo
    alpha2: float
    n_simbolos: int
    ruido_radar: float
    A: np.ndarray = field(init=False, repr=False)
    dA_theta: np.ndarray = field(init=False, repr=False)
    dA_phi: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.alpha2 > 0:
            raise ArgumentoInvalidoError(f"|α|² deve ser positivo: {self.alpha2}")
        if self.n_simbolos < 1:
            raise ArgumentoInvalidoError(f"L deve ser >= 1: {self.n_simbolos}")
        if not self.ruido_radar > 0:
            raise ArgumentoInvalidoError(f"σ_m² deve ser positivo: {self.ruido_radar}")

        a = direcao_tx(self.geom_tx, self.angulos)
        da_theta, da_phi = derivadas_direcao_tx(self.geom_tx, self.angulos)
        b = direcao_rx(self.geom_rx, self.angulos.theta)
        db_theta = derivada_direcao_rx(self.geom_rx, self.angulos.theta)

        A = np.outer(b, a.conj())
        dA_theta = np.outer(db_theta, a.conj()) + np.outer(b, da_theta.conj())
        dA_phi = np.outer(b, da_phi.conj())

        for nome, valor in (('A', A), ('dA_theta', dA_theta), ('dA_phi', dA_phi)):
            valor.setflags(write=False)
            object.__setattr__(self, nome, valor)

    @property
    def kappa(self) -> float:
        """2|α|²L/σ_m²"""
        return 2 * self.alpha2 * self.n_simbolos / self.ruido_radar


@dataclass(frozen=True)
class MatrizFim:
    """FIM 2×2 real simétrica [[F_θθ, F_θφ], [F_θφ, F_φφ]]"""
    F: np.ndarray

    @property
    def theta_theta(self) -> float:
        return float(self.F[0, 0])

    @property
    def theta_phi(self) -> float:
        return float(self.F[0, 1])

    @property
    def phi_phi(self) -> float:
        return float(self.F[1, 1])


@dataclass(frozen=True)
class ResultadoCrb:
    """tr(F⁻¹) e entradas diagonais (rad²) com RCRB por ângulo"""
    traco: float
    crb_theta: float
    crb_phi: float
    fim: MatrizFim

    @property
    def rcrb_theta(self) -> float:
        return float(np.sqrt(self.crb_theta))

    @property
    def rcrb_phi(self) -> float:
        return float(np.sqrt(self.crb_phi))

    @property
    def rcrb_theta_graus(self) -> float:
        return float(np.degrees(self.rcrb_theta))

    @property
    def rcrb_phi_graus(self) -> float:
        return float(np.degrees(self.rcrb_phi))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'traco_crb': self.traco,
            'crb_theta': self.crb_theta,
            'crb_phi': self.crb_phi,
            'rcrb_theta_rad': self.rcrb_theta,
            'rcrb_phi_rad': self.rcrb_phi,
            'rcrb_theta_graus': self.rcrb_theta_graus,
            'rcrb_phi_graus': self.rcrb_phi_graus,
            'fim': self.fim.F.tolist(),
        }


def criar_contexto_fim(cfg: ConfigCenario, geom_tx: GeometriaArranjo,
                       geom_rx: GeometriaArranjo) -> ContextoFim:
    """Contexto da FIM para o alvo e SNR radar configurados"""
    return ContextoFim(
        geom_tx=geom_tx,
        geom_rx=geom_rx,
        angulos=cfg.alvo,
        alpha2=alpha2_de_snr(cfg.snr_radar_db, cfg.ruido_radar, cfg.potencia_total_mw),
        n_simbolos=cfg.n_simbolos,
        ruido_radar=cfg.ruido_radar,
    )


def alpha2_de_snr(snr_db: float, ruido_radar: float, potencia_total: float) -> float:
    """|α|² = 10^{SNR/10}·σ_m²/P_t"""
    return 10 ** (snr_db / 10) * ruido_radar / potencia_total


def matrizes_fim(ctx: ContextoFim) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Matrizes M_ij (N_t × N_t) com F_ij = κ·Re tr(M_ij R_X)

    Returns:
        (M_θθ, M_θφ, M_φφ)
    """
    dt, dp = ctx.dA_theta, ctx.dA_phi
    return dt.conj().T @ dt, dt.conj().T @ dp, dp.conj().T @ dp


def _validar_covariancia(R: np.ndarray, n: int) -> np.ndarray:
    R = np.asarray(R, dtype=complex)
    if R.shape != (n, n):
        raise ArgumentoInvalidoError(f"R_X deve ser {n}×{n}, recebido {R.shape}")
    escala = max(1.0, float(np.abs(R).max()))
    if np.abs(R - R.conj().T).max() > TOLERANCIA_HERMITIANA * escala:
        raise ArgumentoInvalidoError("R_X não é hermitiana")
    R = (R + R.conj().T) / 2
    if np.linalg.eigvalsh(R).min() < -TOLERANCIA_HERMITIANA * escala:
        raise ArgumentoInvalidoError("R_X não é semidefinida positiva")
    return R


def calcular_fim(ctx: ContextoFim, R: np.ndarray) -> MatrizFim:
    """
    FIM de (θ, φ) para a covariância de transmissão R_X

    Args:
        ctx: Contexto
        R: R_X hermitiana PSD (N_t × N_t)

    Returns:
        MatrizFim
    """
    R = _validar_covariancia(R, ctx.geom_tx.n_elementos)
    m_tt, m_tp, m_pp = matrizes_fim(ctx)

    f_tt = np.real(np.trace(m_tt @ R))
    f_tp = np.real(np.trace(m_tp @ R))
    f_pp = np.real(np.trace(m_pp @ R))
    F = ctx.kappa * np.array([[f_tt, f_tp], [f_tp, f_pp]])
    return MatrizFim(F)


def calcular_crb(ctx: ContextoFim, R: np.ndarray) -> ResultadoCrb:
    """
    tr(F⁻¹) e RCRB por ângulo

    Raises:
        AlvoNaoIdentificavelError: F singular (condição >= 1e12)
    """
    fim = calcular_fim(ctx, R)
    F = fim.F
    if not np.all(np.isfinite(F)) or np.abs(F).max() == 0 or np.linalg.cond(F) >= CONDICAO_MAXIMA:
        raise AlvoNaoIdentificavelError(
            "FIM singular: R_X não carrega informação em alguma direção angular"
        )

    C = np.linalg.inv(F)
    return ResultadoCrb(
        traco=float(np.trace(C)),
        crb_theta=float(C[0, 0]),
        crb_phi=float(C[1, 1]),
        fim=fim,
    )
