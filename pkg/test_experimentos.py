"""
Testes de orquestração: especificações, varreduras, estimação e validação
"""

from pathlib import Path

import numpy as np
import pytest

from src import experimentos
from src.cache_manager import CacheManager
from src.cenario import ConfigCenario, Estrategia
from src.excecoes import ErroConfiguracao, ErroRestricaoViolada
from src.experimentos import (
    CATEGORIA_CACHE,
    COLUNAS_VARREDURA,
    EspecificacaoExperimento,
    agregar_estimacao,
    carregar_especificacao,
    especificacao_de_dict,
    executar_experimento_estimacao,
    executar_ponto,
    executar_validacao,
    executar_varredura_rcrb,
    otimizar_com_cache,
)
from src.utils import carregar_csv, carregar_json

CONFIG_DIR = Path(__file__).parent / 'config'

CENARIO_PEQUENO = {
    'n_feeds': 4, 'n_usuarios': 4, 'n_rx': 6, 'r_th': 1.0,
    'n_simbolos': 64, 'amostras_por_simbolo': 16, 'max_iteracoes': 60,
    'passo_grade_graus': 1.0, 'passo_refino_graus': 0.0, 'semente': 1,
}


def _spec(tmp_path, **kw):
    dados = {
        'cenario': CENARIO_PEQUENO,
        'variavel': 'snr_radar_db',
        'valores': [20.0, 28.0],
        'estrategias': ['radar'],
        'sementes': [0, 1],
        'saida': str(tmp_path / 'saida'),
    }
    dados.update(kw)
    return especificacao_de_dict(dados)


# ----------------------------------------------------------------------
# Especificação
# ----------------------------------------------------------------------

def test_especificacao_de_dict(tmp_path):
    spec = _spec(tmp_path)
    assert isinstance(spec, EspecificacaoExperimento)
    assert spec.cenario.n_feeds == 4
    assert spec.estrategias == [Estrategia.RADAR]
    assert spec.cenario_ponto(24.0, 3).snr_radar_db == 24.0
    assert spec.cenario_ponto(24.0, 3).semente == 3
    assert spec.cenario_ponto(24.0).semente == 1
    assert spec.to_dict()['estrategias'] == ['radar']


@pytest.mark.parametrize('alteracao, chave', [
    ({'variavel': 'n_feeds'}, 'variavel'),
    ({'valores': []}, 'valores'),
    ({'estrategias': []}, 'estrategias'),
    ({'sementes': [1, 1]}, 'sementes'),
    ({'desconhecida': 1}, 'desconhecida'),
])
def test_especificacao_invalida(tmp_path, alteracao, chave):
    with pytest.raises(ErroConfiguracao) as info:
        _spec(tmp_path, **alteracao)
    assert info.value.chave == chave


def test_especificacao_sem_chave_obrigatoria():
    with pytest.raises(ErroConfiguracao, match='valores'):
        especificacao_de_dict({'variavel': 'r_th', 'estrategias': ['rsma']})


def test_especificacao_com_estrategia_desconhecida(tmp_path):
    with pytest.raises(ErroConfiguracao):
        _spec(tmp_path, estrategias=['fdma'])


def test_arquivos_de_experimento_do_repositorio():
    spec = carregar_especificacao(str(CONFIG_DIR / 'experimento_snr.yaml'))
    assert spec.cenario == ConfigCenario()
    assert spec.variavel == 'snr_radar_db'
    assert spec.estrategias == [Estrategia.RADAR, Estrategia.RSMA, Estrategia.SDMA]

    rth = carregar_especificacao(str(CONFIG_DIR / 'experimento_rth.yaml'))
    assert rth.variavel == 'r_th'


def test_cenario_relativo_ao_arquivo(tmp_path):
    (tmp_path / 'cenario.yaml').write_text('n_feeds: 4\nn_usuarios: 4\n', encoding='utf-8')
    experimento = tmp_path / 'experimento.yaml'
    experimento.write_text(
        'cenario: cenario.yaml\nvariavel: r_th\nvalores: [1, 2]\nestrategias: [sdma]\n',
        encoding='utf-8',
    )
    spec = carregar_especificacao(str(experimento))
    assert spec.cenario.n_feeds == 4
    assert spec.valores == [1.0, 2.0]
    assert spec.sementes == [0]


# ----------------------------------------------------------------------
# Pontos e varreduras
# ----------------------------------------------------------------------

def test_ponto_inviavel_vira_linha(cfg_pequeno, ambiente_limpo):
    cfg = cfg_pequeno.com(r_th=50.0, max_iteracoes_max_min=5)
    linha, resumo = executar_ponto(cfg, Estrategia.SDMA, 'r_th', 50.0, cache_dir=None)

    assert resumo is None
    assert linha.status == 'inviavel'
    assert linha.rcrb_theta_graus is None
    assert linha.hash_cenario == cfg.hash()
    assert 'inatingível' in linha.mensagem


def test_taxa_violada_vira_linha(cfg_pequeno, ambiente_limpo, monkeypatch):
    def violar(*args, **kwargs):
        raise ErroRestricaoViolada(1, "taxa total 0.9 bps/Hz abaixo de R_th = 1.0 bps/Hz")

    monkeypatch.setattr(experimentos, 'executar_sca', violar)
    linha, resumo = executar_ponto(cfg_pequeno, Estrategia.SDMA, 'r_th', 1.0, cache_dir=None)

    assert resumo is None
    assert linha.status == 'taxa_violada'
    assert 'abaixo de R_th' in linha.mensagem


def test_otimizacao_em_cache(cfg_pequeno, ambiente_limpo, tmp_path):
    cache = CacheManager(str(tmp_path / 'cache'))
    primeiro = otimizar_com_cache(cfg_pequeno, Estrategia.RADAR, cache)
    segundo = otimizar_com_cache(cfg_pequeno, Estrategia.RADAR, cache)

    assert cache.stats()['categorias'] == {CATEGORIA_CACHE: 1}
    assert segundo['crb']['traco_crb'] == pytest.approx(primeiro['crb']['traco_crb'])
    assert segundo['beamformers']['estrategia'] == 'radar'


def test_varredura_snr_reprodutivel(tmp_path, ambiente_limpo):
    sem_cache = _spec(tmp_path, saida=str(tmp_path / 'a'))
    linhas = executar_varredura_rcrb(sem_cache, workers=1, cache_dir=None)

    com_cache = _spec(tmp_path, saida=str(tmp_path / 'b'))
    executar_varredura_rcrb(com_cache, workers=1, cache_dir=str(tmp_path / 'cache'))
    recuperado = _spec(tmp_path, saida=str(tmp_path / 'c'))
    executar_varredura_rcrb(recuperado, workers=1, cache_dir=str(tmp_path / 'cache'))

    csv_a = (tmp_path / 'a' / 'rcrb_snr_radar_db.csv').read_bytes()
    assert csv_a == (tmp_path / 'b' / 'rcrb_snr_radar_db.csv').read_bytes()
    assert csv_a == (tmp_path / 'c' / 'rcrb_snr_radar_db.csv').read_bytes()

    tabela = carregar_csv(str(tmp_path / 'a' / 'rcrb_snr_radar_db.csv'))
    assert list(tabela[0]) == COLUNAS_VARREDURA
    assert [(l.valor, l.semente) for l in linhas] == [(20.0, 0), (20.0, 1), (28.0, 0), (28.0, 1)]
    assert all(l.status == 'convergiu' for l in linhas)
    assert linhas[2].rcrb_theta_graus < linhas[0].rcrb_theta_graus

    dados = carregar_json(str(tmp_path / 'a' / 'rcrb_snr_radar_db.json'))
    assert dados['especificacao']['variavel'] == 'snr_radar_db'
    assert len(dados['linhas']) == 4


# ----------------------------------------------------------------------
# Estimação
# ----------------------------------------------------------------------

def test_agregar_estimacao():
    linhas = [
        {'estrategia': 'rsma', 'valor': 4.0, 'erro_theta_graus': e_t, 'erro_phi_graus': e_p,
         'acerto_doppler': d, 'acerto_angulo': a, 'razao_pico_mediana': 10.0, 'largura_bin_hz': 244.0}
        for e_t, e_p, d, a in [(0.3, -0.4, 1, 1), (-0.3, 0.4, 1, 0)]
    ]
    agregado = agregar_estimacao(linhas, {'rcrb_theta_graus': 0.1, 'rcrb_phi_graus': 0.2}, 'h')

    assert agregado['rmse_theta_graus'] == pytest.approx(0.3)
    assert agregado['rmse_phi_graus'] == pytest.approx(0.4)
    assert agregado['razao_rmse_rcrb_theta'] == pytest.approx(3.0)
    assert agregado['razao_rmse_rcrb_phi'] == pytest.approx(2.0)
    assert agregado['taxa_acerto_doppler'] == 1.0
    assert agregado['taxa_acerto_angulo'] == 0.5
    assert agregado['n_sementes'] == 2


@pytest.mark.slow
def test_experimento_estimacao_radar(tmp_path, ambiente_limpo):
    spec = _spec(tmp_path, valores=[28.0], sementes=[0, 1, 2],
                 cenario=dict(CENARIO_PEQUENO, modo_doppler='lento'))
    saida = executar_experimento_estimacao(spec, workers=1, cache_dir=None)

    assert len(saida['sementes']) == 3
    assert len(saida['agregado']) == 1
    assert saida['agregado'][0]['taxa_acerto_doppler'] == 1.0
    pasta = Path(spec.saida)
    for nome in ('estimacao_sementes.csv', 'estimacao_rmse.csv', 'estimacao.json',
                 'espectro_radar_28p00_s0.csv', 'doppler_radar_28p00_s0.csv'):
        assert (pasta / nome).exists(), nome


@pytest.mark.slow
def test_rmse_nao_supera_o_limitante(tmp_path, ambiente_limpo):
    cenario = dict(CENARIO_PEQUENO, passo_grade_graus=0.5, passo_refino_graus=0.01)
    spec = _spec(tmp_path, cenario=cenario, valores=[0.0], sementes=list(range(50)))
    agregado = executar_experimento_estimacao(spec, workers=1, cache_dir=None)['agregado'][0]

    assert agregado['n_sementes'] == 50
    assert agregado['razao_rmse_rcrb_theta'] >= 0.95
    assert agregado['razao_rmse_rcrb_phi'] >= 0.95


@pytest.mark.slow
def test_rsma_com_picos_mais_agudos_que_sdma(tmp_path, ambiente_limpo):
    spec = _spec(tmp_path, cenario={'passo_refino_graus': 0.0}, variavel='r_th', valores=[4.0],
                 estrategias=['rsma', 'sdma'], sementes=list(range(10)))
    linhas = executar_experimento_estimacao(spec, workers=1, cache_dir=None)['sementes']

    razoes = {(l['estrategia'], l['semente']): l['razao_pico_mediana'] for l in linhas}
    vitorias = [razoes[('rsma', s)] >= razoes[('sdma', s)] for s in spec.sementes]
    assert np.mean(vitorias) >= 0.8


# ----------------------------------------------------------------------
# Validação
# ----------------------------------------------------------------------

def test_validacao_rapida(cfg_pequeno, ambiente_limpo, tmp_path):
    verificacoes = executar_validacao(cfg_pequeno, semente=0, incluir_otimizador=False,
                                      saida=str(tmp_path))
    nomes = {v.nome for v in verificacoes}
    assert nomes == {'derivadas_direcao', 'fim_oraculo', 'fim_linear_psd', 'schur_traco'}
    assert all(v.ok for v in verificacoes), [v for v in verificacoes if not v.ok]
    assert len(carregar_json(str(tmp_path / 'validacao.json'))['verificacoes']) == 4


@pytest.mark.slow
def test_validacao_completa(cfg_pequeno, ambiente_limpo):
    verificacoes = executar_validacao(cfg_pequeno, semente=0)
    falhas = [v for v in verificacoes if not v.ok]
    assert not falhas, falhas
    assert {'sca_monotono', 'posto_um', 'radar_abaixo_uniforme'} <= {v.nome for v in verificacoes}
