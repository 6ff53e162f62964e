"""
SINR e taxas de RSMA / SDMA
Taxas em bps/Hz (eficiência espectral); nenhuma multiplicação por banda
"""

import logging
from dataclasses import dataclass
from typing import Dict, Any, Optional, Union

import numpy as np

from .cenario import Estrategia
from .excecoes import ArgumentoInvalidoError, ErroRestricaoViolada

logger = logging.getLogger(__name__)

TOLERANCIA_DIVISAO = 1e-9


@dataclass(frozen=True)
class ConjuntoPrecoders:
    """
    Precoder comum p_c e precoders privados p_k (colunas de privados)

    Attributes:
        p_c: Vetor N_t
        privados: Matriz N_t × K (coluna k = p_k)
        estrategia: RSMA, SDMA ou RADAR (apenas fluxos privados)
    """
    p_c: np.ndarray
    privados: np.ndarray
    estrategia: Estrategia

    def __post_init__(self):
        p_c = np.asarray(self.p_c, dtype=complex).reshape(-1)
        privados = np.asarray(self.privados, dtype=complex)
        if privados.ndim == 1:
            privados = privados[:, None]
        if privados.shape[0] != p_c.shape[0]:
            raise ArgumentoInvalidoError(
                f"p_c tem {p_c.shape[0]} entradas, privados têm {privados.shape[0]} linhas"
            )
        if self.estrategia != Estrategia.RSMA and np.any(p_c != 0):
            raise ArgumentoInvalidoError(f"Estratégia {self.estrategia.value} exige p_c = 0")
        object.__setattr__(self, 'p_c', p_c)
        object.__setattr__(self, 'privados', privados)

    @property
    def n_feeds(self) -> int:
        return self.p_c.shape[0]

    @property
    def n_privados(self) -> int:
        return self.privados.shape[1]

    @property
    def matriz(self) -> np.ndarray:
        """P = [p_c, p_1, ..., p_K]"""
        return np.column_stack([self.p_c, self.privados])

    @property
    def covariancia(self) -> np.ndarray:
        """R_X = P P^H"""
        P = self.matriz
        return P @ P.conj().T

    def to_dict(self) -> Dict[str, Any]:
        return {
            'estrategia': self.estrategia.value,
            'p_c': {'re': self.p_c.real.tolist(), 'im': self.p_c.imag.tolist()},
            'privados': {'re': self.privados.real.tolist(), 'im': self.privados.imag.tolist()},
        }

    @classmethod
    def from_dict(cls, dados: Dict[str, Any]) -> 'ConjuntoPrecoders':
        try:
            p_c = np.array(dados['p_c']['re']) + 1j * np.array(dados['p_c']['im'])
            privados = np.array(dados['privados']['re']) + 1j * np.array(dados['privados']['im'])
            estrategia = Estrategia.de_texto(dados['estrategia'])
        except (KeyError, TypeError) as e:
            raise ArgumentoInvalidoError(f"JSON de beamformers malformado: {e}") from e
        return cls(p_c, privados, estrategia)


@dataclass
class RelatorioTaxas:
    """Resultado da avaliação de taxas (bps/Hz)"""
    sinr_comum: np.ndarray
    sinr_privado: np.ndarray
    taxa_comum: float
    divisoes: np.ndarray
    taxas_privadas: np.ndarray
    taxas_totais: np.ndarray
    estrategia: Estrategia

    def to_dict(self) -> Dict[str, Any]:
        return {
            'estrategia': self.estrategia.value,
            'sinr_comum': self.sinr_comum.tolist(),
            'sinr_privado': self.sinr_privado.tolist(),
            'taxa_comum': float(self.taxa_comum),
            'divisoes_comum': self.divisoes.tolist(),
            'taxas_privadas': self.taxas_privadas.tolist(),
            'taxas_totais': self.taxas_totais.tolist(),
        }


def _preparar(H: np.ndarray, bf: ConjuntoPrecoders,
              ruido: Union[float, np.ndarray]) -> tuple:
    H = np.asarray(H)
    if H.shape[0] != bf.n_feeds:
        raise ArgumentoInvalidoError(
            f"Canal com {H.shape[0]} feeds para precoders com {bf.n_feeds}"
        )
    if bf.n_privados != H.shape[1]:
        raise ArgumentoInvalidoError(
            f"{bf.n_privados} precoders privados para {H.shape[1]} usuários"
        )
    ruido = np.broadcast_to(np.asarray(ruido, dtype=float), (H.shape[1],))
    if np.any(ruido <= 0):
        raise ArgumentoInvalidoError("Variância de ruído deve ser positiva")

    # ganhos[k, i] = |h_k^H p_i|²
    ganhos = np.abs(H.conj().T @ bf.privados) ** 2
    return H, ruido, ganhos


def sinr_comum(H: np.ndarray, bf: ConjuntoPrecoders,
               ruido: Union[float, np.ndarray]) -> np.ndarray:
    """
    SINR do fluxo comum em cada usuário

    γ_c,k = |h_k^H p_c|² / (Σ_i |h_k^H p_i|² + σ_k²)

    Args:
        H: Canal N_t × K
        bf: Precoders
        ruido: σ_n² escalar ou por usuário

    Returns:
        Vetor K
    """
    H, ruido, ganhos = _preparar(H, bf, ruido)
    sinal = np.abs(H.conj().T @ bf.p_c) ** 2
    return sinal / (ganhos.sum(axis=1) + ruido)


def sinr_privado(H: np.ndarray, bf: ConjuntoPrecoders,
                 ruido: Union[float, np.ndarray]) -> np.ndarray:
    """
    SINR do fluxo privado após SIC do fluxo comum

    γ_k = |h_k^H p_k|² / (Σ_{i≠k} |h_k^H p_i|² + σ_k²)
    """
    _, ruido, ganhos = _preparar(H, bf, ruido)
    sinal = np.diag(ganhos)
    return sinal / (ganhos.sum(axis=1) - sinal + ruido)


def relatorio_taxas(H: np.ndarray, bf: ConjuntoPrecoders,
                    ruido: Union[float, np.ndarray],
                    divisoes: Optional[np.ndarray] = None) -> RelatorioTaxas:
    """
    Avalia taxas comum, privadas e totais

    Args:
        H: Canal
        bf: Precoders
        ruido: σ_n²
        divisoes: Parcelas C_k da taxa comum (None = zero)

    Returns:
        RelatorioTaxas

    Raises:
        ErroRestricaoViolada: C_k < 0 ou Σ C_k acima da taxa comum
    """
    k = np.asarray(H).shape[1]
    gamma_c = sinr_comum(H, bf, ruido)
    gamma_p = sinr_privado(H, bf, ruido)

    divisoes = np.zeros(k) if divisoes is None else np.asarray(divisoes, dtype=float).copy()
    if divisoes.shape != (k,):
        raise ArgumentoInvalidoError(f"Esperadas {k} parcelas comuns, recebidas {divisoes.shape}")

    if bf.estrategia == Estrategia.RSMA:
        taxas_comum_usuario = np.log2(1 + gamma_c)
        taxa_comum = float(taxas_comum_usuario.min())
        negativos = np.flatnonzero(divisoes < 0)
        if negativos.size:
            raise ErroRestricaoViolada(int(negativos[0]), f"parcela comum negativa {divisoes[negativos[0]]}")
        excesso = divisoes.sum() - taxas_comum_usuario
        if np.any(excesso > TOLERANCIA_DIVISAO):
            usuario = int(np.argmax(excesso))
            raise ErroRestricaoViolada(
                usuario,
                f"Σ C_k = {divisoes.sum():.6f} excede a taxa comum decodificável "
                f"{taxas_comum_usuario[usuario]:.6f} bps/Hz"
            )
    else:
        if np.any(divisoes != 0):
            logger.warning(f"Estratégia {bf.estrategia.value}: parcelas comuns forçadas a zero")
        divisoes = np.zeros(k)
        taxa_comum = 0.0

    taxas_privadas = np.log2(1 + gamma_p)
    return RelatorioTaxas(
        sinr_comum=gamma_c,
        sinr_privado=gamma_p,
        taxa_comum=taxa_comum,
        divisoes=divisoes,
        taxas_privadas=taxas_privadas,
        taxas_totais=divisoes + taxas_privadas,
        estrategia=bf.estrategia,
    )
