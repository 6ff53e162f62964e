"""
Testes da interface de linha de comando
"""

import os
from pathlib import Path

import pytest

import main
from src.excecoes import ErroRestricaoViolada
from src.utils import carregar_csv, carregar_json

CONFIG_PEQUENO = str(Path(__file__).parent / 'config' / 'pequeno.yaml')


@pytest.fixture
def pasta(tmp_path, monkeypatch, ambiente_limpo):
    """Executa a CLI a partir de um diretório temporário"""
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_estrategia_desconhecida(pasta):
    assert main.main(['optimize', '--config', CONFIG_PEQUENO, '--strategy', 'fdma']) == 1


def test_configuracao_invalida(pasta):
    (pasta / 'ruim.yaml').write_text('n_feeds: [1, 2\n', encoding='utf-8')
    assert main.main(['optimize', '--config', 'ruim.yaml']) == 1


def test_configuracao_inexistente(pasta):
    assert main.main(['optimize', '--config', 'nada.yaml']) == 1


def test_optimize_radar(pasta):
    assert main.main(['optimize', '--config', CONFIG_PEQUENO, '--strategy', 'radar', '--out', 'saida']) == 0

    dados = carregar_json(str(pasta / 'saida' / 'otimizacao_radar_1p00.json'))
    assert dados['crb']['rcrb_theta_graus'] > 0
    assert dados['cenario']['n_feeds'] == 4


def test_optimize_inviavel(pasta):
    cenario = pasta / 'dificil.yaml'
    cenario.write_text(
        Path(CONFIG_PEQUENO).read_text(encoding='utf-8') + '\nmax_iteracoes_max_min: 5\n',
        encoding='utf-8',
    )
    assert main.main(['optimize', '--config', str(cenario), '--strategy', 'sdma', '--rth', '50']) == 2


def test_validate_rapida(pasta):
    assert main.main(['validate', '--config', CONFIG_PEQUENO, '--rapida', '--out', 'saida']) == 0
    verificacoes = carregar_json(str(pasta / 'saida' / 'validacao.json'))['verificacoes']
    assert all(v['ok'] for v in verificacoes)


def test_plot_sem_resultados(pasta):
    assert main.main(['plot', '--out', 'vazio']) == 1


def test_sweep_e_plot(pasta):
    experimento = pasta / 'experimento.yaml'
    experimento.write_text(
        f"cenario: {CONFIG_PEQUENO}\n"
        "variavel: snr_radar_db\n"
        "valores: [20]\n"
        "estrategias: [radar]\n"
        "sementes: [0]\n",
        encoding='utf-8',
    )
    assert main.main(['sweep', '--experimento', str(experimento), '--sem-cache', '--out', 'res']) == 0

    linhas = carregar_csv(str(pasta / 'res' / 'rcrb_snr_radar_db.csv'))
    assert len(linhas) == 1
    assert linhas[0]['status'] == 'convergiu'
    assert not os.path.exists(pasta / '.cache')

    assert main.main(['plot', '--out', 'res']) == 0
    assert (pasta / 'res' / 'rcrb_snr_radar_db.png').exists()


def _experimento_radar(pasta, saida):
    experimento = pasta / 'experimento.yaml'
    experimento.write_text(
        f"cenario: {CONFIG_PEQUENO}\n"
        "variavel: snr_radar_db\n"
        "valores: [20]\n"
        "estrategias: [radar]\n"
        "sementes: [0]\n"
        f"saida: {saida}\n",
        encoding='utf-8',
    )
    return str(experimento)


def test_out_explicito_sobrepoe_saida_do_experimento(pasta):
    experimento = _experimento_radar(pasta, 'do_yaml')
    assert main.main(['sweep', '--experimento', experimento, '--sem-cache', '--out', 'resultados']) == 0

    assert (pasta / 'resultados' / 'rcrb_snr_radar_db.csv').exists()
    assert not (pasta / 'do_yaml').exists()


def test_sweep_sem_out_usa_saida_do_experimento(pasta):
    experimento = _experimento_radar(pasta, 'do_yaml')
    assert main.main(['sweep', '--experimento', experimento, '--sem-cache']) == 0

    assert (pasta / 'do_yaml' / 'rcrb_snr_radar_db.csv').exists()
    assert not (pasta / 'resultados').exists()


def test_taxa_violada_apos_extracao_falha(pasta, monkeypatch):
    def violar(*args, **kwargs):
        raise ErroRestricaoViolada(2, "taxa total 0.4 bps/Hz abaixo de R_th = 1.0 bps/Hz")

    monkeypatch.setattr(main, 'otimizar_cenario', violar)
    assert main.main(['optimize', '--config', CONFIG_PEQUENO, '--strategy', 'sdma', '--out', 'saida']) == 1
    assert not (pasta / 'saida' / 'otimizacao_sdma_1p00.json').exists()
