"""
Testes da FIM e do CRB de (θ, φ)
"""

import numpy as np
import pytest

from src.arranjos import direcao_tx
from src.crb import (
    ContextoFim,
    alpha2_de_snr,
    calcular_crb,
    calcular_fim,
    criar_contexto_fim,
    matrizes_fim,
)
from src.excecoes import AlvoNaoIdentificavelError, ArgumentoInvalidoError
from src.experimentos import verificar_fim, verificar_linearidade_fim


@pytest.fixture
def ctx(cfg_referencia, geometrias):
    return criar_contexto_fim(cfg_referencia, *geometrias)


def test_alpha2_de_snr():
    assert alpha2_de_snr(28.0, 1.0, 1000.0) == pytest.approx(10 ** 2.8 / 1000.0)
    assert alpha2_de_snr(0.0, 2.0, 4.0) == pytest.approx(0.5)


def test_contexto_rejeita_parametros_invalidos(cfg_referencia, geometrias):
    geom_tx, geom_rx = geometrias
    with pytest.raises(ArgumentoInvalidoError):
        ContextoFim(geom_tx, geom_rx, cfg_referencia.alvo, 0.0, 256, 1.0)
    with pytest.raises(ArgumentoInvalidoError):
        ContextoFim(geom_tx, geom_rx, cfg_referencia.alvo, 1.0, 0, 1.0)


def test_fim_simetrica_e_psd(ctx, rng):
    G = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    F = calcular_fim(ctx, G @ G.conj().T).F
    np.testing.assert_allclose(F, F.T)
    assert np.linalg.eigvalsh(F).min() >= -1e-9 * np.abs(F).max()


def test_fim_bate_com_diferencas_finitas(cfg_referencia):
    assert verificar_fim(cfg_referencia, np.random.default_rng(0)).ok


def test_fim_linear_em_r(cfg_referencia):
    assert verificar_linearidade_fim(cfg_referencia, np.random.default_rng(1)).ok


def test_matrizes_fim_reproduzem_traco(ctx, rng):
    G = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    R = G @ G.conj().T
    m_tt, m_tp, m_pp = matrizes_fim(ctx)
    F = calcular_fim(ctx, R)
    assert F.theta_theta == pytest.approx(ctx.kappa * np.real(np.trace(m_tt @ R)))
    assert F.theta_phi == pytest.approx(ctx.kappa * np.real(np.trace(m_tp @ R)))
    assert F.phi_phi == pytest.approx(ctx.kappa * np.real(np.trace(m_pp @ R)))


def test_crb_uniforme(cfg_referencia, ctx):
    resultado = calcular_crb(ctx, cfg_referencia.potencia_por_feed_mw * np.eye(9))
    C = np.linalg.inv(resultado.fim.F)
    assert resultado.traco == pytest.approx(np.trace(C))
    assert resultado.crb_theta + resultado.crb_phi == pytest.approx(resultado.traco)
    assert resultado.rcrb_theta_graus == pytest.approx(np.degrees(np.sqrt(C[0, 0])))
    assert set(resultado.to_dict()) >= {'traco_crb', 'rcrb_theta_graus', 'rcrb_phi_graus', 'fim'}


def test_crb_escala_com_snr(cfg_referencia, geometrias):
    R = cfg_referencia.potencia_por_feed_mw * np.eye(9)
    base = calcular_crb(criar_contexto_fim(cfg_referencia, *geometrias), R).traco
    forte = calcular_crb(criar_contexto_fim(cfg_referencia.com(snr_radar_db=38.0), *geometrias), R).traco
    assert forte == pytest.approx(base / 10, rel=1e-9)


def test_posto_um_na_direcao_do_alvo_nao_identificavel(cfg_referencia, geometrias, ctx):
    # UCA centrada: a ⟂ ∂a/∂φ, logo R = a a^H não informa φ
    a = direcao_tx(geometrias[0], cfg_referencia.alvo)
    with pytest.raises(AlvoNaoIdentificavelError):
        calcular_crb(ctx, np.outer(a, a.conj()))


def test_covariancia_invalida(ctx):
    with pytest.raises(ArgumentoInvalidoError):
        calcular_fim(ctx, np.eye(8))
    with pytest.raises(ArgumentoInvalidoError):
        calcular_fim(ctx, np.triu(np.ones((9, 9))))
    with pytest.raises(ArgumentoInvalidoError):
        calcular_fim(ctx, -np.eye(9))


def test_covariancia_nula_nao_identificavel(ctx):
    with pytest.raises(AlvoNaoIdentificavelError):
        calcular_crb(ctx, np.zeros((9, 9)))
