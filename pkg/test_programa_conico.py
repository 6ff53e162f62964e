"""
Testes do programa cônico e do backend cvxpy
"""

import cvxpy as cp
import numpy as np
import pytest

from src.excecoes import ErroSolver
from src.experimentos import verificar_schur
from src.programa_conico import (
    STATUS_INVIAVEL,
    BackendCvxpy,
    ProgramaConico,
    bloco_schur,
    residuos_escalonados,
    resolver_subproblema,
)


def test_contagem_por_tipo_de_cone():
    X = cp.Variable((3, 3), hermitian=True)
    x = cp.Variable(2)
    programa = ProgramaConico(objetivo=cp.real(cp.trace(X)), variaveis={'X': X, 'x': x})
    programa.adicionar('psd', X >> 0)
    programa.adicionar('soc', cp.SOC(x[0], x[1:]))
    programa.adicionar('igualdade', [x[0] == 1, cp.real(X[0, 0]) == 1])
    programa.adicionar('desigualdade', x >= -1)

    contagem = programa.contagem()
    assert contagem['psd'] == {3: 1}
    assert contagem['soc'] == 1
    assert contagem['igualdades'] == 2
    assert contagem['desigualdades'] == 2
    assert len(programa.restricoes) == 5


def test_bloco_schur_reproduz_inversa():
    F = np.array([[3.0, 1.0], [1.0, 2.0]])
    t = cp.Variable()
    programa = ProgramaConico(objetivo=t, variaveis={'t': t})
    programa.adicionar('schur', bloco_schur([[F[0, 0], F[0, 1]], [F[1, 0], F[1, 1]]], 1, t))

    solucao = resolver_subproblema(programa, BackendCvxpy())
    assert solucao.otima
    assert solucao.valor_objetivo == pytest.approx(np.linalg.inv(F)[1, 1], rel=1e-6)
    assert float(solucao.valores['t']) == pytest.approx(0.6, rel=1e-6)


def test_traco_por_blocos_de_schur(ambiente_limpo):
    assert verificar_schur(np.random.default_rng(5), instancias=5).ok


def test_programa_inviavel(ambiente_limpo):
    x = cp.Variable()
    programa = ProgramaConico(objetivo=x, variaveis={'x': x})
    programa.adicionar('limites', [x >= 1, x <= 0])
    solucao = BackendCvxpy().resolver(programa)
    assert solucao.status == STATUS_INVIAVEL
    assert not solucao.otima
    assert solucao.valores == {}


def test_residuos_por_grupo():
    x = cp.Variable(2)
    x.value = np.array([1.5, -0.5])
    programa = ProgramaConico(objetivo=cp.sum(x), variaveis={'x': x})
    programa.adicionar('teto', x <= 1)
    programa.adicionar('piso', x >= -1)

    residuos = residuos_escalonados(programa)
    assert residuos['piso'] == 0.0
    assert residuos['teto'] == pytest.approx(0.5 / 2.5)


def test_solver_variavel_de_ambiente(monkeypatch):
    monkeypatch.setenv('DFRC_SOLVER', 'scs')
    assert BackendCvxpy('CLARABEL').solver == 'SCS'


def test_solver_inexistente(monkeypatch):
    monkeypatch.delenv('DFRC_SOLVER', raising=False)
    backend = BackendCvxpy('NAO_EXISTE', alternativa=None)
    x = cp.Variable()
    programa = ProgramaConico(objetivo=x, variaveis={'x': x})
    programa.adicionar('piso', x >= 0)
    with pytest.raises(ErroSolver, match='NAO_EXISTE'):
        backend.resolver(programa)
