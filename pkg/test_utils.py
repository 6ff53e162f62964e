"""
Testes das funções auxiliares e do cache de otimizações
"""

import json
import os
from datetime import datetime, timedelta

import numpy as np
import pytest

import gerenciar_cache
from src.cache_manager import CacheManager
from src.utils import (
    carregar_csv,
    carregar_json,
    carregar_yaml,
    gerar_nome_arquivo,
    hash_dados,
    obter_num_workers,
    para_json,
    salvar_csv,
    salvar_json,
)


# ----------------------------------------------------------------------
# Utilitários
# ----------------------------------------------------------------------

def test_gerar_nome_arquivo():
    assert gerar_nome_arquivo('espectro', 'rsma', 4.0, 0) == 'espectro_rsma_4p00_s0.csv'
    assert gerar_nome_arquivo('otimizacao', 'sdma', 2.5, extensao='json') == 'otimizacao_sdma_2p50.json'
    assert gerar_nome_arquivo('doppler', 'radar', -1.0, 3) == 'doppler_radar_m1p00_s3.csv'


def test_para_json_converte_numpy():
    dados = {
        'inteiro': np.int64(3),
        'real': np.float64(0.5),
        'logico': np.bool_(True),
        'complexo': 1 - 2j,
        'vetor': np.array([1.0, 2.0]),
        'vetor_complexo': np.array([1j, 2.0]),
        1: (np.float32(1.5),),
    }
    saida = para_json(dados)
    assert json.loads(json.dumps(saida)) == {
        'inteiro': 3,
        'real': 0.5,
        'logico': True,
        'complexo': {'re': 1.0, 'im': -2.0},
        'vetor': [1.0, 2.0],
        'vetor_complexo': {'re': [0.0, 2.0], 'im': [1.0, 0.0]},
        '1': [1.5],
    }


def test_hash_estavel_e_sensivel():
    assert hash_dados({'a': 1, 'b': 2.0}) == hash_dados({'b': 2.0, 'a': 1})
    assert hash_dados({'a': 1}) != hash_dados({'a': 2})
    assert len(hash_dados({'a': 1})) == 12


def test_csv_reprodutivel(tmp_path):
    linhas = [{'x': 0.1 + 0.2, 'y': None, 'z': 'rsma'}, {'x': np.float64(1e-300), 'y': 3}]
    caminho_a = tmp_path / 'a' / 'tabela.csv'
    caminho_b = tmp_path / 'b.csv'
    salvar_csv(linhas, str(caminho_a), ['x', 'y', 'z'])
    salvar_csv(linhas, str(caminho_b), ['x', 'y', 'z'])

    assert caminho_a.read_bytes() == caminho_b.read_bytes()
    lidas = carregar_csv(str(caminho_a))
    assert float(lidas[0]['x']) == 0.1 + 0.2
    assert lidas[0]['y'] == ''
    assert lidas[1]['x'] == '1e-300'


def test_json_com_diretorio(tmp_path):
    caminho = tmp_path / 'sub' / 'dados.json'
    salvar_json({'r': np.float64(2.0)}, str(caminho))
    assert carregar_json(str(caminho)) == {'r': 2.0}


def test_arquivos_inexistentes(tmp_path):
    with pytest.raises(FileNotFoundError):
        carregar_yaml(str(tmp_path / 'nada.yaml'))
    with pytest.raises(FileNotFoundError):
        carregar_json(str(tmp_path / 'nada.json'))
    with pytest.raises(FileNotFoundError):
        carregar_csv(str(tmp_path / 'nada.csv'))


def test_yaml_vazio(tmp_path):
    caminho = tmp_path / 'vazio.yaml'
    caminho.write_text('', encoding='utf-8')
    assert carregar_yaml(str(caminho)) == {}


def test_num_workers(monkeypatch):
    monkeypatch.setenv('DFRC_WORKERS', '4')
    assert obter_num_workers() == 4
    monkeypatch.setenv('DFRC_WORKERS', '0')
    assert obter_num_workers() == 1
    monkeypatch.setenv('DFRC_WORKERS', 'muitos')
    assert obter_num_workers(2) == 2


# ----------------------------------------------------------------------
# CacheManager
# ----------------------------------------------------------------------

PARAMS = {'hash_cenario': 'abc123', 'estrategia': 'rsma', 'r_th': 4.0, 'semente': 0}


def test_cache_get_set(tmp_path, ambiente_limpo):
    cache = CacheManager(str(tmp_path / 'cache'))
    assert cache.get('otimizacao', PARAMS) is None

    cache.set('otimizacao', PARAMS, {'crb': {'traco_crb': 1e-6}})
    assert cache.get('otimizacao', PARAMS) == {'crb': {'traco_crb': 1e-6}}
    assert cache.get('otimizacao', dict(PARAMS, semente=1)) is None
    assert cache.get('outra', PARAMS) is None


def test_cache_desabilitado(tmp_path, monkeypatch):
    monkeypatch.setenv('CACHE_ENABLED', 'false')
    cache = CacheManager(str(tmp_path / 'cache'))
    cache.set('otimizacao', PARAMS, {'x': 1})
    assert cache.get('otimizacao', PARAMS) is None
    assert not (tmp_path / 'cache').exists()


def test_cache_expirado(tmp_path, ambiente_limpo):
    cache = CacheManager(str(tmp_path), ttl_hours=1)
    cache.set('otimizacao', PARAMS, {'x': 1})
    arquivo = next(tmp_path.glob('*.json'))
    dados = json.loads(arquivo.read_text(encoding='utf-8'))
    dados['timestamp'] = (datetime.now() - timedelta(hours=2)).isoformat()
    arquivo.write_text(json.dumps(dados), encoding='utf-8')

    assert cache.get('otimizacao', PARAMS) is None
    assert not arquivo.exists()


def test_cache_corrompido(tmp_path, ambiente_limpo):
    cache = CacheManager(str(tmp_path))
    cache.set('otimizacao', PARAMS, {'x': 1})
    next(tmp_path.glob('*.json')).write_text('{quebrado', encoding='utf-8')
    assert cache.get('otimizacao', PARAMS) is None


def test_cache_limpeza_e_estatisticas(tmp_path, ambiente_limpo):
    cache = CacheManager(str(tmp_path))
    for semente in range(3):
        cache.set('otimizacao', dict(PARAMS, semente=semente), {'x': semente})
    cache.set('validacao', PARAMS, {'ok': True})

    stats = cache.stats()
    assert stats['total_files'] == 4
    assert stats['categorias'] == {'otimizacao': 3, 'validacao': 1}

    assert cache.clear(older_than_hours=1) == 0
    assert cache.clear() == 4
    assert cache.stats()['total_files'] == 0


def test_gerenciar_cache_cli(tmp_path, ambiente_limpo, capsys):
    diretorio = str(tmp_path / 'cache')
    CacheManager(diretorio).set('otimizacao', PARAMS, {'x': 1})

    assert gerenciar_cache.main(['stats', '--dir', diretorio]) == 0
    assert 'Arquivos: 1' in capsys.readouterr().out

    assert gerenciar_cache.main(['clear', '--sim', '--dir', diretorio]) == 0
    assert not os.listdir(diretorio)


def test_entradas_por_categoria(tmp_path, ambiente_limpo):
    cache = CacheManager(str(tmp_path))
    cache.set('otimizacao', PARAMS, {'status': 'convergiu'})
    cache.set('validacao', PARAMS, {'ok': True})
    (tmp_path / 'lixo.json').write_text('{quebrado', encoding='utf-8')

    entradas = cache.entradas('otimizacao')
    assert len(entradas) == 1
    assert entradas[0]['params'] == PARAMS
    assert len(cache.entradas()) == 2


def test_gerenciar_cache_lista_otimizacoes(tmp_path, ambiente_limpo, capsys):
    diretorio = str(tmp_path / 'cache')
    cache = CacheManager(diretorio)
    cache.set('otimizacao', PARAMS, {'status': 'convergiu', 'crb': {'rcrb_theta_graus': 0.0123}})
    cache.set('otimizacao', dict(PARAMS, estrategia='sdma'), {'status': 'convergiu', 'crb': {}})

    assert gerenciar_cache.main(['list', '--dir', diretorio, '--estrategia', 'rsma']) == 0
    saida = capsys.readouterr().out
    assert '1.2300e-02' in saida
    assert 'sdma' not in saida
    assert '1 entrada(s)' in saida
