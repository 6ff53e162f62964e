"""
Simulação de sinais DFRC: símbolos QPSK, bloco transmitido X e eco biestático Z

Amostra i (1..L·M): z[i] = α e^{j2π F_D i T_s} b(θ) a^H(θ,φ) x[i] + m[i]
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .arranjos import GeometriaArranjo, AngulosAlvo, direcao_tx, direcao_rx
from .cenario import ConfigCenario
from .excecoes import ArgumentoInvalidoError
from .taxas import ConjuntoPrecoders
from .utils import salvar_csv

logger = logging.getLogger(__name__)

MAGICA = b'DFRC'
VERSAO_FORMATO = 1

_CABECALHO = np.dtype([
    ('magica', 'S4'),
    ('versao', '<u4'),
    ('n_tx', '<u4'),
    ('n_rx', '<u4'),
    ('n_amostras', '<u4'),
    ('amostras_por_simbolo', '<u4'),
    ('periodo_amostra', '<f8'),
    ('theta', '<f8'),
    ('phi', '<f8'),
    ('doppler', '<f8'),
    ('alpha_re', '<f8'),
    ('alpha_im', '<f8'),
])


@dataclass(frozen=True)
class VerdadeAlvo:
    """Parâmetros verdadeiros do alvo"""
    angulos: AngulosAlvo
    doppler_hz: float
    alpha: complex


@dataclass(frozen=True)
class ConjuntoEco:
    """
    Um CPI: amostras transmitidas X (N_t × L·M) e recebidas Z (N_r × L·M)
    """
    X: np.ndarray
    Z: np.ndarray
    verdade: VerdadeAlvo
    periodo_amostra_s: float
    amostras_por_simbolo: int

    def __post_init__(self):
        if self.X.shape[1] != self.Z.shape[1]:
            raise ArgumentoInvalidoError(
                f"X e Z com números de amostras diferentes: {self.X.shape[1]} != {self.Z.shape[1]}"
            )
        if self.X.shape[1] % self.amostras_por_simbolo:
            raise ArgumentoInvalidoError("Número de amostras não é múltiplo de M_symb")

    @property
    def n_amostras(self) -> int:
        return self.X.shape[1]

    @property
    def n_simbolos(self) -> int:
        return self.n_amostras // self.amostras_por_simbolo

    @property
    def periodo_simbolo_s(self) -> float:
        """T = M_symb·T_s"""
        return self.amostras_por_simbolo * self.periodo_amostra_s


def gerar_fluxos(n_privados: int, n_simbolos: int, rng: np.random.Generator) -> np.ndarray:
    """
    Símbolos QPSK i.i.d. de potência unitária

    Args:
        n_privados: K (gera K+1 fluxos: comum + privados)
        n_simbolos: L
        rng: Gerador numpy

    Returns:
        Matriz (K+1) × L com entradas em {(±1±j)/√2}
    """
    if n_simbolos < 1:
        raise ArgumentoInvalidoError(f"L deve ser >= 1: {n_simbolos}")
    bits = rng.integers(0, 2, size=(2, n_privados + 1, n_simbolos))
    return ((1 - 2 * bits[0]) + 1j * (1 - 2 * bits[1])) / np.sqrt(2)


def transmitir(bf: ConjuntoPrecoders, fluxos: np.ndarray, amostras_por_simbolo: int) -> np.ndarray:
    """
    x[l] = P s[l], com pulso retangular de M_symb amostras por símbolo

    Returns:
        X na taxa de amostragem (N_t × L·M)
    """
    P = bf.matriz
    if fluxos.shape[0] != P.shape[1]:
        raise ArgumentoInvalidoError(
            f"{fluxos.shape[0]} fluxos para {P.shape[1]} precoders"
        )
    return np.repeat(P @ fluxos, amostras_por_simbolo, axis=1)


def eco(X: np.ndarray, verdade: VerdadeAlvo, geom_tx: GeometriaArranjo,
        geom_rx: GeometriaArranjo, periodo_amostra_s: float, ruido_radar: float,
        rng: np.random.Generator) -> np.ndarray:
    """
    Eco biestático com Doppler por amostra e ruído CN(0, σ_m²)

    Returns:
        Z (N_r × L·M)
    """
    a = direcao_tx(geom_tx, verdade.angulos)
    b = direcao_rx(geom_rx, verdade.angulos.theta)

    indices = np.arange(1, X.shape[1] + 1)
    fase_doppler = np.exp(1j * 2 * np.pi * verdade.doppler_hz * indices * periodo_amostra_s)
    Z = verdade.alpha * np.outer(b, fase_doppler * (a.conj() @ X))

    if ruido_radar > 0:
        ruido = rng.standard_normal(Z.shape) + 1j * rng.standard_normal(Z.shape)
        Z = Z + np.sqrt(ruido_radar / 2) * ruido
    return Z


def simular_cpi(cfg: ConfigCenario, bf: ConjuntoPrecoders,
                geometrias: Tuple[GeometriaArranjo, GeometriaArranjo],
                rng: np.random.Generator, alpha: Optional[complex] = None) -> ConjuntoEco:
    """
    Gera um CPI completo com os beamformers dados

    Args:
        cfg: Cenário (L, M_symb, T, alvo, SNR radar)
        bf: Beamformers
        geometrias: (tx, rx)
        rng: Gerador numpy
        alpha: Coeficiente do alvo (padrão: derivado da SNR radar)
    """
    geom_tx, geom_rx = geometrias
    verdade = VerdadeAlvo(
        angulos=cfg.alvo,
        doppler_hz=cfg.doppler_hz,
        alpha=cfg.alpha if alpha is None else alpha,
    )
    fluxos = gerar_fluxos(bf.n_privados, cfg.n_simbolos, rng)
    X = transmitir(bf, fluxos, cfg.amostras_por_simbolo)
    Z = eco(X, verdade, geom_tx, geom_rx, cfg.periodo_amostra_s, cfg.ruido_radar, rng)
    return ConjuntoEco(X, Z, verdade, cfg.periodo_amostra_s, cfg.amostras_por_simbolo)


def salvar_eco_binario(conjunto: ConjuntoEco, caminho: str) -> None:
    """
    Formato binário little-endian: cabeçalho fixo (dimensões, T_s, verdade)
    seguido de X e Z com re/im intercalados em float64
    """
    verdade = conjunto.verdade
    cabecalho = np.array([(
        MAGICA, VERSAO_FORMATO, conjunto.X.shape[0], conjunto.Z.shape[0], conjunto.n_amostras,
        conjunto.amostras_por_simbolo, conjunto.periodo_amostra_s,
        verdade.angulos.theta, verdade.angulos.phi, verdade.doppler_hz,
        complex(verdade.alpha).real, complex(verdade.alpha).imag,
    )], dtype=_CABECALHO)

    with open(caminho, 'wb') as f:
        cabecalho.tofile(f)
        conjunto.X.astype('<c16').tofile(f)
        conjunto.Z.astype('<c16').tofile(f)
    logger.info(f"Eco salvo: {caminho}")


def carregar_eco_binario(caminho: str) -> ConjuntoEco:
    """Lê um arquivo gravado por salvar_eco_binario"""
    with open(caminho, 'rb') as f:
        cabecalho = np.fromfile(f, dtype=_CABECALHO, count=1)
        if cabecalho.size != 1 or cabecalho['magica'][0] != MAGICA:
            raise ArgumentoInvalidoError(f"Arquivo não é um eco DFRC: {caminho}")
        cab = cabecalho[0]
        if int(cab['versao']) != VERSAO_FORMATO:
            raise ArgumentoInvalidoError(f"Versão de formato não suportada: {int(cab['versao'])}")

        n_tx, n_rx, n_amostras = int(cab['n_tx']), int(cab['n_rx']), int(cab['n_amostras'])
        X = np.fromfile(f, dtype='<c16', count=n_tx * n_amostras)
        Z = np.fromfile(f, dtype='<c16', count=n_rx * n_amostras)

    if X.size != n_tx * n_amostras or Z.size != n_rx * n_amostras:
        raise ArgumentoInvalidoError(f"Arquivo de eco truncado: {caminho}")

    verdade = VerdadeAlvo(
        angulos=AngulosAlvo(float(cab['theta']), float(cab['phi'])),
        doppler_hz=float(cab['doppler']),
        alpha=complex(float(cab['alpha_re']), float(cab['alpha_im'])),
    )
    return ConjuntoEco(
        X=X.reshape(n_tx, n_amostras).astype(complex),
        Z=Z.reshape(n_rx, n_amostras).astype(complex),
        verdade=verdade,
        periodo_amostra_s=float(cab['periodo_amostra']),
        amostras_por_simbolo=int(cab['amostras_por_simbolo']),
    )


def salvar_eco_csv(conjunto: ConjuntoEco, caminho: str) -> None:
    """CSV em formato longo (amostra, lado, elemento, re, im); para casos pequenos"""
    linhas = []
    for lado, matriz in (('tx', conjunto.X), ('rx', conjunto.Z)):
        for elemento in range(matriz.shape[0]):
            for amostra in range(matriz.shape[1]):
                valor = matriz[elemento, amostra]
                linhas.append({
                    'amostra': amostra + 1,
                    'lado': lado,
                    'elemento': elemento,
                    're': float(valor.real),
                    'im': float(valor.imag),
                })
    salvar_csv(linhas, caminho, ['amostra', 'lado', 'elemento', 're', 'im'])
