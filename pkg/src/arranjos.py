"""
Geometria de arranjos de antenas
Vetores de direção de transmissão (UCA no satélite) e recepção (ULA no
receptor biestático), com derivadas analíticas em relação aos ângulos
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .excecoes import ArgumentoInvalidoError

logger = logging.getLogger(__name__)

DOIS_PI = 2 * np.pi


@dataclass(frozen=True)
class GeometriaArranjo:
    """
    Posições cartesianas dos elementos (metros) e comprimento de onda

    Attributes:
        posicoes: Matriz (n_elementos, 3)
        comprimento_onda: Comprimento de onda da portadora (m)
    """
    posicoes: np.ndarray
    comprimento_onda: float

    def __post_init__(self):
        posicoes = np.atleast_2d(np.asarray(self.posicoes, dtype=float))
        if posicoes.ndim != 2 or posicoes.shape[1] != 3 or posicoes.shape[0] < 1:
            raise ArgumentoInvalidoError(
                f"Posições devem ter formato (n, 3) com n >= 1, recebido {posicoes.shape}"
            )
        if not np.all(np.isfinite(posicoes)):
            raise ArgumentoInvalidoError("Posições dos elementos devem ser finitas")
        if not self.comprimento_onda > 0:
            raise ArgumentoInvalidoError(
                f"Comprimento de onda deve ser positivo: {self.comprimento_onda}"
            )
        posicoes.setflags(write=False)
        object.__setattr__(self, 'posicoes', posicoes)
        object.__setattr__(self, 'comprimento_onda', float(self.comprimento_onda))

    @property
    def n_elementos(self) -> int:
        return self.posicoes.shape[0]

    @property
    def numero_onda(self) -> float:
        """2π/λ"""
        return DOIS_PI / self.comprimento_onda


@dataclass(frozen=True)
class AngulosAlvo:
    """
    Azimute θ ∈ [0, 2π) e elevação φ ∈ [0, π/2], em radianos
    """
    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta < DOIS_PI):
            raise ArgumentoInvalidoError(f"Azimute fora de [0, 2π): {self.theta}")
        if not (0.0 <= self.phi <= np.pi / 2):
            raise ArgumentoInvalidoError(f"Elevação fora de [0, π/2]: {self.phi}")

    @classmethod
    def de_graus(cls, theta_graus: float, phi_graus: float) -> 'AngulosAlvo':
        return cls(float(np.radians(theta_graus)), float(np.radians(phi_graus)))

    def em_graus(self) -> Tuple[float, float]:
        return float(np.degrees(self.theta)), float(np.degrees(self.phi))


def _validar_contagem(n_elementos: int, comprimento_onda: float) -> None:
    if n_elementos < 2:
        raise ArgumentoInvalidoError(f"Arranjo precisa de ao menos 2 elementos: {n_elementos}")
    if not comprimento_onda > 0:
        raise ArgumentoInvalidoError(f"Comprimento de onda deve ser positivo: {comprimento_onda}")


def raio_uca_padrao(n_elementos: int, comprimento_onda: float) -> float:
    """
    Raio da UCA com espaçamento de arco de λ/2 entre elementos adjacentes

    Returns:
        λ·N/(4π)
    """
    return comprimento_onda * n_elementos / (4 * np.pi)


def criar_uca(n_elementos: int, raio: float, comprimento_onda: float) -> GeometriaArranjo:
    """
    Cria arranjo circular uniforme no plano z=0, centrado na origem

    Args:
        n_elementos: Número de elementos (>= 2)
        raio: Raio do círculo (m)
        comprimento_onda: Comprimento de onda (m)

    Returns:
        GeometriaArranjo com o elemento 0 sobre o eixo x
    """
    _validar_contagem(n_elementos, comprimento_onda)
    if not raio > 0:
        raise ArgumentoInvalidoError(f"Raio da UCA deve ser positivo: {raio}")

    angulos = DOIS_PI * np.arange(n_elementos) / n_elementos
    posicoes = np.column_stack([
        raio * np.cos(angulos),
        raio * np.sin(angulos),
        np.zeros(n_elementos),
    ])
    # Zera resíduos de arredondamento (ex.: cos(π/2))
    posicoes[np.abs(posicoes) < 1e-15 * raio] = 0.0
    return GeometriaArranjo(posicoes, comprimento_onda)


def criar_ula(n_elementos: int, espacamento: float, comprimento_onda: float) -> GeometriaArranjo:
    """
    Cria arranjo linear uniforme sobre o eixo x, a partir da origem

    Args:
        n_elementos: Número de elementos (>= 2)
        espacamento: Distância entre elementos (m)
        comprimento_onda: Comprimento de onda (m)
    """
    _validar_contagem(n_elementos, comprimento_onda)
    if not espacamento > 0:
        raise ArgumentoInvalidoError(f"Espaçamento da ULA deve ser positivo: {espacamento}")

    posicoes = np.zeros((n_elementos, 3))
    posicoes[:, 0] = espacamento * np.arange(n_elementos)
    return GeometriaArranjo(posicoes, comprimento_onda)


def _direcao_unitaria(theta, phi) -> np.ndarray:
    """u(θ,φ) = [cosθcosφ, sinθcosφ, sinφ]; aceita arrays (broadcast), eixo final = 3"""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack(np.broadcast_arrays(
        np.cos(theta) * np.cos(phi),
        np.sin(theta) * np.cos(phi),
        np.sin(phi),
    ), axis=-1)


def direcao_tx(geom: GeometriaArranjo, angulos: AngulosAlvo) -> np.ndarray:
    """
    Vetor de direção de transmissão a(θ, φ)

    Elemento i: exp(j·(2π/λ)·⟨r_i, u(θ,φ)⟩)

    Returns:
        Vetor complexo de comprimento N_t
    """
    u = _direcao_unitaria(angulos.theta, angulos.phi)
    return np.exp(1j * geom.numero_onda * (geom.posicoes @ u))


def matriz_direcao_tx(geom: GeometriaArranjo, thetas, phis) -> np.ndarray:
    """
    Vetores de direção de transmissão para vários pares (θ, φ)

    Sem validação de domínio, usado na busca em grade.

    Args:
        geom: Geometria de transmissão
        thetas, phis: Arrays (broadcast) de ângulos em radianos

    Returns:
        Matriz N_t × n_pares (uma coluna por par)
    """
    u = _direcao_unitaria(thetas, phis).reshape(-1, 3)
    return np.exp(1j * geom.numero_onda * (geom.posicoes @ u.T))


def direcao_rx(geom: GeometriaArranjo, theta: float) -> np.ndarray:
    """
    Vetor de direção de recepção b(θ) = exp(−j·(2π/λ)·⟨r_i, [cosθ, sinθ, 0]⟩)
    """
    u = np.array([np.cos(theta), np.sin(theta), 0.0])
    return np.exp(-1j * geom.numero_onda * (geom.posicoes @ u))


def matriz_direcao_rx(geom: GeometriaArranjo, thetas) -> np.ndarray:
    """Vetores b(θ) empilhados como colunas (N_r × n_theta)"""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    u = np.column_stack([np.cos(thetas), np.sin(thetas), np.zeros_like(thetas)])
    return np.exp(-1j * geom.numero_onda * (geom.posicoes @ u.T))


def derivadas_direcao_tx(geom: GeometriaArranjo,
                         angulos: AngulosAlvo) -> Tuple[np.ndarray, np.ndarray]:
    """
    Derivadas analíticas de a(θ, φ)

    Returns:
        (∂a/∂θ, ∂a/∂φ)
    """
    theta, phi = angulos.theta, angulos.phi
    a = direcao_tx(geom, angulos)
    du_dtheta = np.array([-np.sin(theta) * np.cos(phi), np.cos(theta) * np.cos(phi), 0.0])
    du_dphi = np.array([-np.cos(theta) * np.sin(phi), -np.sin(theta) * np.sin(phi), np.cos(phi)])

    k = geom.numero_onda
    da_dtheta = a * 1j * k * (geom.posicoes @ du_dtheta)
    da_dphi = a * 1j * k * (geom.posicoes @ du_dphi)
    return da_dtheta, da_dphi


def derivada_direcao_rx(geom: GeometriaArranjo, theta: float) -> np.ndarray:
    """∂b/∂θ com ∂u/∂θ = [−sinθ, cosθ, 0]"""
    b = direcao_rx(geom, theta)
    du_dtheta = np.array([-np.sin(theta), np.cos(theta), 0.0])
    return b * (-1j) * geom.numero_onda * (geom.posicoes @ du_dtheta)
