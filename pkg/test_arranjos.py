"""
Testes de geometria de arranjos e vetores de direção
"""

import numpy as np
import pytest

from src.arranjos import (
    AngulosAlvo,
    GeometriaArranjo,
    criar_uca,
    criar_ula,
    derivada_direcao_rx,
    derivadas_direcao_tx,
    direcao_rx,
    direcao_tx,
    matriz_direcao_rx,
    matriz_direcao_tx,
    raio_uca_padrao,
)
from src.excecoes import ArgumentoInvalidoError

LAMBDA = 0.015


def test_uca_centrada_com_espacamento_de_meio_comprimento():
    n = 9
    raio = raio_uca_padrao(n, LAMBDA)
    geom = criar_uca(n, raio, LAMBDA)

    assert raio == pytest.approx(LAMBDA * n / (4 * np.pi))
    np.testing.assert_allclose(geom.posicoes.sum(axis=0), 0.0, atol=1e-15)
    np.testing.assert_allclose(np.linalg.norm(geom.posicoes, axis=1), raio)
    assert geom.posicoes[0, 0] == pytest.approx(raio)
    # arco entre vizinhos = λ/2
    assert 2 * np.pi * raio / n == pytest.approx(LAMBDA / 2)


def test_ula_sobre_eixo_x():
    geom = criar_ula(5, LAMBDA / 2, LAMBDA)
    np.testing.assert_allclose(geom.posicoes[:, 0], LAMBDA / 2 * np.arange(5))
    np.testing.assert_allclose(geom.posicoes[:, 1:], 0.0)


@pytest.mark.parametrize('fabrica, argumento', [
    (criar_uca, 0.01),
    (criar_ula, 0.01),
])
def test_arranjo_com_um_elemento_e_rejeitado(fabrica, argumento):
    with pytest.raises(ArgumentoInvalidoError):
        fabrica(1, argumento, LAMBDA)


def test_geometria_rejeita_formato_invalido():
    with pytest.raises(ArgumentoInvalidoError):
        GeometriaArranjo(np.zeros((3, 2)), LAMBDA)
    with pytest.raises(ArgumentoInvalidoError):
        GeometriaArranjo(np.zeros((3, 3)), 0.0)


@pytest.mark.parametrize('theta, phi', [
    (2 * np.pi, 0.5),
    (-0.1, 0.5),
    (1.0, -0.01),
    (1.0, np.pi / 2 + 0.01),
])
def test_angulos_fora_do_dominio(theta, phi):
    with pytest.raises(ArgumentoInvalidoError):
        AngulosAlvo(theta, phi)


def test_direcao_tem_modulo_unitario_e_fase_esperada():
    geom = criar_uca(9, raio_uca_padrao(9, LAMBDA), LAMBDA)
    angulos = AngulosAlvo.de_graus(45.0, 83.0)
    a = direcao_tx(geom, angulos)

    np.testing.assert_allclose(np.abs(a), 1.0)
    u = np.array([
        np.cos(angulos.theta) * np.cos(angulos.phi),
        np.sin(angulos.theta) * np.cos(angulos.phi),
        np.sin(angulos.phi),
    ])
    np.testing.assert_allclose(a, np.exp(1j * 2 * np.pi / LAMBDA * geom.posicoes @ u))


def test_zenite_tem_fase_nula_em_arranjo_planar():
    geom = criar_uca(6, 0.01, LAMBDA)
    a = direcao_tx(geom, AngulosAlvo(0.3, np.pi / 2))
    np.testing.assert_allclose(a, np.ones(6), atol=1e-12)


def test_matrizes_de_direcao_coincidem_com_vetores():
    geom_tx = criar_uca(7, raio_uca_padrao(7, LAMBDA), LAMBDA)
    geom_rx = criar_ula(4, LAMBDA / 2, LAMBDA)
    thetas = np.radians([40.0, 45.0, 50.0])
    phis = np.radians([75.0, 83.0, 89.0])

    A = matriz_direcao_tx(geom_tx, thetas, phis)
    B = matriz_direcao_rx(geom_rx, thetas)
    for i in range(3):
        np.testing.assert_allclose(A[:, i], direcao_tx(geom_tx, AngulosAlvo(thetas[i], phis[i])))
        np.testing.assert_allclose(B[:, i], direcao_rx(geom_rx, thetas[i]))


def test_derivadas_coincidem_com_diferencas_finitas(rng):
    geom_tx = criar_uca(9, raio_uca_padrao(9, LAMBDA), LAMBDA)
    geom_rx = criar_ula(10, LAMBDA / 2, LAMBDA)
    h = 1e-6

    for _ in range(10):
        theta = rng.uniform(0.1, 2 * np.pi - 0.1)
        phi = rng.uniform(0.1, np.pi / 2 - 0.1)
        da_dt, da_dp = derivadas_direcao_tx(geom_tx, AngulosAlvo(theta, phi))

        fd_t = (direcao_tx(geom_tx, AngulosAlvo(theta + h, phi))
                - direcao_tx(geom_tx, AngulosAlvo(theta - h, phi))) / (2 * h)
        fd_p = (direcao_tx(geom_tx, AngulosAlvo(theta, phi + h))
                - direcao_tx(geom_tx, AngulosAlvo(theta, phi - h))) / (2 * h)
        fd_b = (direcao_rx(geom_rx, theta + h) - direcao_rx(geom_rx, theta - h)) / (2 * h)

        np.testing.assert_allclose(da_dt, fd_t, rtol=1e-6, atol=1e-6)
        np.testing.assert_allclose(da_dp, fd_p, rtol=1e-6, atol=1e-6)
        np.testing.assert_allclose(derivada_direcao_rx(geom_rx, theta), fd_b, rtol=1e-6, atol=1e-6)


def test_uca_centrada_derivada_ortogonal_ao_vetor():
    # Σ r_i = 0 implica a^H ∂a/∂φ = 0
    geom = criar_uca(9, raio_uca_padrao(9, LAMBDA), LAMBDA)
    angulos = AngulosAlvo.de_graus(45.0, 83.0)
    a = direcao_tx(geom, angulos)
    _, da_dp = derivadas_direcao_tx(geom, angulos)
    assert abs(a.conj() @ da_dp) < 1e-10
