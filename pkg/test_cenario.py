"""
Testes de configuração de cenário e geração de canal
"""

from pathlib import Path

import numpy as np
import pytest

from src.canal import (
    centros_feixes,
    ganho_padrao_feixe,
    gerar_canal,
    montar_canal,
    posicionar_usuarios,
    raio_cobertura,
    salvar_canal_csv,
    snr_mrt_db,
)
from src.cenario import ConfigCenario, Estrategia, carregar_cenario, montar_geometrias
from src.excecoes import ArgumentoInvalidoError, ErroConfiguracao
from src.utils import carregar_csv

CONFIG_DIR = Path(__file__).parent / 'config'


def test_padroes_do_cenario_de_referencia(cfg_referencia):
    assert cfg_referencia.n_feeds == 9
    assert cfg_referencia.n_usuarios == 9
    assert cfg_referencia.n_rx == 10
    assert cfg_referencia.comprimento_onda == pytest.approx(299792458.0 / 20e9)
    assert cfg_referencia.potencia_total_mw == pytest.approx(1000.0)
    assert cfg_referencia.potencia_por_feed_mw == pytest.approx(1000.0 / 9)
    assert cfg_referencia.ruido_mw == pytest.approx(1.0)
    assert cfg_referencia.periodo_amostra_s == pytest.approx(4e-6 / 64)
    assert cfg_referencia.alvo.em_graus() == pytest.approx((45.0, 83.0))
    # |α|² = SNR·σ_m²/P_t
    assert cfg_referencia.alpha2 == pytest.approx(10 ** 2.8 / 1000.0)


def test_arquivo_de_referencia_reproduz_padroes():
    assert carregar_cenario(str(CONFIG_DIR / 'referencia.yaml')) == ConfigCenario()


def test_from_dict_converte_graus():
    cfg = ConfigCenario.from_dict({'theta_alvo_graus': 50.0, 'n_feeds': 4, 'n_usuarios': 4})
    assert cfg.theta_alvo_rad == pytest.approx(np.radians(50.0))
    assert cfg.to_dict()['theta_alvo_graus'] == pytest.approx(50.0)
    assert ConfigCenario.from_dict(cfg.to_dict()) == cfg


@pytest.mark.parametrize('dados, chave', [
    ({'chave_inexistente': 1}, 'chave_inexistente'),
    ({'theta_alvo_rad': 0.5}, 'theta_alvo_rad'),
    ({'n_feeds': 'nove'}, 'n_feeds'),
    ({'n_feeds': 2.5}, 'n_feeds'),
    ({'r_th': -1.0}, 'r_th'),
    ({'modo_doppler': 'outro'}, 'modo_doppler'),
])
def test_configuracao_invalida_nomeia_chave(dados, chave):
    with pytest.raises(ErroConfiguracao) as info:
        ConfigCenario.from_dict(dados)
    assert info.value.chave == chave
    assert chave in str(info.value)


def test_yaml_malformado(tmp_path):
    caminho = tmp_path / 'cenario.yaml'
    caminho.write_text("n_rx: muitos\n", encoding='utf-8')
    with pytest.raises(ErroConfiguracao, match='n_rx'):
        carregar_cenario(str(caminho))


def test_hash_muda_com_parametro(cfg_referencia):
    assert cfg_referencia.hash() == ConfigCenario().hash()
    assert cfg_referencia.com(r_th=3.0).hash() != cfg_referencia.hash()


def test_estrategia_de_texto():
    assert Estrategia.de_texto(' RSMA ') == Estrategia.RSMA
    assert Estrategia.de_texto('radar') == Estrategia.RADAR
    with pytest.raises(ArgumentoInvalidoError, match='fdma'):
        Estrategia.de_texto('fdma')


def test_geometrias_do_cenario(cfg_referencia):
    geom_tx, geom_rx = montar_geometrias(cfg_referencia)
    assert geom_tx.n_elementos == 9
    assert geom_rx.n_elementos == 10
    assert geom_rx.posicoes[1, 0] == pytest.approx(cfg_referencia.comprimento_onda / 2)


# ----------------------------------------------------------------------
# Canal
# ----------------------------------------------------------------------

def test_padrao_de_feixe_normalizado():
    assert ganho_padrao_feixe(0.0) == pytest.approx(1.0)
    assert ganho_padrao_feixe(1e-6) == pytest.approx(1.0, abs=1e-9)
    u = np.linspace(1e-3, 3.0, 200)
    g = ganho_padrao_feixe(u)
    assert np.all(g <= 1.0 + 1e-12)
    assert np.all(g >= 0.0)


def test_centros_em_aneis_hexagonais(cfg_referencia):
    centros = centros_feixes(cfg_referencia)
    r = raio_cobertura(cfg_referencia)
    assert centros.shape == (9, 3)
    np.testing.assert_allclose(centros[0], 0.0)
    np.testing.assert_allclose(np.linalg.norm(centros[1:7, :2], axis=1), np.sqrt(3) * r)
    np.testing.assert_allclose(np.linalg.norm(centros[7:, :2], axis=1), 2 * np.sqrt(3) * r)


def test_usuarios_dentro_da_cobertura(cfg_referencia, rng):
    posicoes = posicionar_usuarios(cfg_referencia, rng)
    distancias = np.linalg.norm(posicoes - centros_feixes(cfg_referencia), axis=1)
    assert np.all(distancias <= raio_cobertura(cfg_referencia) + 1e-9)
    np.testing.assert_allclose(posicoes[:, 2], 0.0)


def test_numero_de_usuarios_diferente_de_feeds(rng):
    with pytest.raises(ArgumentoInvalidoError):
        posicionar_usuarios(ConfigCenario(n_feeds=4, n_usuarios=3), rng)


def test_canal_deterministico_pela_semente(cfg_referencia):
    H1 = gerar_canal(cfg_referencia).H
    H2 = gerar_canal(cfg_referencia).H
    H3 = gerar_canal(cfg_referencia, semente=7).H

    assert H1.shape == (9, 9)
    np.testing.assert_array_equal(H1, H2)
    assert not np.allclose(H1, H3)


def test_fase_do_usuario_nao_altera_amplitude(cfg_referencia, rng):
    posicoes = posicionar_usuarios(cfg_referencia, rng)
    chuva = np.full(9, 0.1)
    H0 = montar_canal(cfg_referencia, posicoes, chuva, np.zeros(9)).H
    H1 = montar_canal(cfg_referencia, posicoes, chuva, rng.uniform(0, 2 * np.pi, 9)).H
    np.testing.assert_allclose(np.abs(H0), np.abs(H1))


def test_chuva_atenua_o_canal(cfg_referencia, rng):
    posicoes = posicionar_usuarios(cfg_referencia, rng)
    fases = np.zeros(9)
    seco = montar_canal(cfg_referencia, posicoes, np.zeros(9), fases).H
    chuvoso = montar_canal(cfg_referencia, posicoes, np.full(9, 3.0), fases).H
    np.testing.assert_allclose(np.abs(chuvoso) / np.abs(seco), 10 ** (-3.0 / 20))


def test_feixe_proprio_domina(cfg_referencia):
    # cada usuário está no centro da cobertura do seu feixe
    H = montar_canal(cfg_referencia, centros_feixes(cfg_referencia), np.zeros(9), np.zeros(9)).H
    assert np.all(np.argmax(np.abs(H), axis=0) == np.arange(9))
    assert np.all(np.isfinite(snr_mrt_db(gerar_canal(cfg_referencia), cfg_referencia)))


def test_canal_exportado_em_csv(cfg_pequeno, tmp_path):
    canal = gerar_canal(cfg_pequeno)
    caminho = tmp_path / 'canal.csv'
    salvar_canal_csv(canal, str(caminho))

    linhas = carregar_csv(str(caminho))
    assert len(linhas) == 4
    re, im = (float(x) for x in linhas[2]['usuario_1'].split(','))
    assert complex(re, im) == canal.H[2, 1]


def test_dobrar_altura_reduz_canal_em_6_db(cfg_referencia):
    alto = cfg_referencia.com(altura_satelite_m=2 * cfg_referencia.altura_satelite_m)
    zeros = np.zeros(9)
    H = montar_canal(cfg_referencia, centros_feixes(cfg_referencia), zeros, zeros).H
    H_alto = montar_canal(alto, centros_feixes(alto), zeros, zeros).H

    # centros escalam com a altura: mesmos ângulos, distâncias dobradas
    np.testing.assert_allclose(np.abs(H_alto) / np.abs(H), 0.5, rtol=1e-9)
    assert 20 * np.log10(0.5) == pytest.approx(-6.02, abs=0.01)


def test_margem_e_ganho_do_usuario_escalam_o_canal(cfg_referencia, rng):
    posicoes = posicionar_usuarios(cfg_referencia, rng)
    zeros = np.zeros(9)
    H = montar_canal(cfg_referencia, posicoes, zeros, zeros).H
    sem_margem = montar_canal(cfg_referencia.com(margem_enlace_db=0.0), posicoes, zeros, zeros).H
    antena_menor = montar_canal(cfg_referencia.com(ganho_antena_usuario_dbi=18.0), posicoes, zeros, zeros).H

    np.testing.assert_allclose(np.abs(sem_margem) / np.abs(H), 10 ** (-30.0 / 20))
    np.testing.assert_allclose(np.abs(antena_menor) / np.abs(H), 10 ** (-20.0 / 20))
