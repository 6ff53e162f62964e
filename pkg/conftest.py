"""
Fixtures compartilhadas dos testes
"""

import numpy as np
import pytest

from src.cenario import ConfigCenario, montar_geometrias


@pytest.fixture
def cfg_referencia():
    """Cenário completo de referência"""
    return ConfigCenario()


@pytest.fixture
def cfg_pequeno():
    """Instância reduzida: 4 feeds, 4 usuários, 6 elementos de recepção"""
    return ConfigCenario(
        n_feeds=4,
        n_usuarios=4,
        n_rx=6,
        r_th=1.0,
        n_simbolos=64,
        amostras_por_simbolo=16,
        max_iteracoes=60,
        passo_grade_rad=float(np.radians(1.0)),
        passo_refino_rad=0.0,
        semente=1,
    )


@pytest.fixture
def geometrias(cfg_referencia):
    return montar_geometrias(cfg_referencia)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def ambiente_limpo(monkeypatch):
    """Remove variáveis de ambiente que alteram solver, cache e workers"""
    for nome in ('DFRC_SOLVER', 'DFRC_WORKERS'):
        monkeypatch.delenv(nome, raising=False)
    monkeypatch.setenv('CACHE_ENABLED', 'true')
