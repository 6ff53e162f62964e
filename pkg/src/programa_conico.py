"""
Representação intermediária de programas cônicos e backend de solução

O programa guarda variáveis nomeadas, um objetivo linear e restrições
agrupadas por nome (lineares, SOC, PSD). Variáveis hermitianas são
levadas à forma real simétrica pela canonicalização do cvxpy na fronteira
com o solver, de modo que qualquer solver cônico real serve de backend.
"""

import os
import logging
from dataclasses import dataclass, field
from typing import Dict, Any, List, Optional, Protocol

import numpy as np
import cvxpy as cp
from dotenv import load_dotenv

from .excecoes import ErroSolver

logger = logging.getLogger(__name__)

STATUS_OTIMO = 'otimo'
STATUS_INVIAVEL = 'inviavel'
STATUS_ILIMITADO = 'ilimitado'

_MAPA_STATUS = {
    cp.OPTIMAL: STATUS_OTIMO,
    cp.OPTIMAL_INACCURATE: STATUS_OTIMO,
    cp.INFEASIBLE: STATUS_INVIAVEL,
    cp.INFEASIBLE_INACCURATE: STATUS_INVIAVEL,
    cp.UNBOUNDED: STATUS_ILIMITADO,
    cp.UNBOUNDED_INACCURATE: STATUS_ILIMITADO,
}

# Tolerâncias apertadas por solver (repassadas ao cvxpy)
_OPCOES_SOLVER = {
    'CLARABEL': {'tol_gap_abs': 1e-8, 'tol_gap_rel': 1e-8, 'tol_feas': 1e-9, 'max_iter': 500},
    'SCS': {'eps_abs': 1e-8, 'eps_rel': 1e-8, 'max_iters': 100000},
}


@dataclass
class ProgramaConico:
    """
    Programa cônico: min objetivo s.a. grupos de restrições

    Attributes:
        objetivo: Expressão escalar real a minimizar
        variaveis: Variáveis nomeadas
        grupos: Restrições por nome de grupo
    """
    objetivo: Any
    variaveis: Dict[str, cp.Variable] = field(default_factory=dict)
    grupos: Dict[str, List[cp.Constraint]] = field(default_factory=dict)

    def adicionar(self, grupo: str, restricoes) -> None:
        """Adiciona uma restrição ou lista de restrições ao grupo"""
        if not isinstance(restricoes, (list, tuple)):
            restricoes = [restricoes]
        self.grupos.setdefault(grupo, []).extend(restricoes)

    @property
    def restricoes(self) -> List[cp.Constraint]:
        return [c for grupo in self.grupos.values() for c in grupo]

    def contagem(self) -> Dict[str, Any]:
        """
        Contagem de cones do programa

        Returns:
            {'psd': {dimensão: quantidade}, 'soc': n_cones,
             'igualdades': n_escalares, 'desigualdades': n_escalares}
        """
        psd: Dict[int, int] = {}
        soc = igualdades = desigualdades = 0
        for c in self.restricoes:
            if isinstance(c, cp.constraints.PSD):
                dim = c.args[0].shape[0]
                psd[dim] = psd.get(dim, 0) + 1
            elif isinstance(c, cp.constraints.SOC):
                soc += c.num_cones()
            elif isinstance(c, (cp.constraints.Equality, cp.constraints.Zero)):
                igualdades += c.size
            else:
                desigualdades += c.size
        return {'psd': psd, 'soc': soc, 'igualdades': igualdades, 'desigualdades': desigualdades}


@dataclass
class SolucaoConica:
    """Solução primal e status do backend"""
    status: str
    status_solver: str
    valor_objetivo: Optional[float]
    valores: Dict[str, np.ndarray] = field(default_factory=dict)
    residuos: Dict[str, float] = field(default_factory=dict)
    solver: str = ''

    @property
    def otima(self) -> bool:
        return self.status == STATUS_OTIMO


class BackendConico(Protocol):
    """Contrato de backend: carrega o programa e devolve status + primal"""

    def resolver(self, programa: ProgramaConico) -> SolucaoConica:
        ...


def bloco_schur(F, indice: int, t) -> Any:
    """
    Bloco [[F, e_i], [e_iᵀ, t]] ⪰ 0 (F 2×2 simétrica)

    Equivale a t >= [F⁻¹]_ii quando F ≻ 0.

    Args:
        F: Lista 2×2 de expressões escalares reais (F[0][1] usado nas duas posições)
        indice: i ∈ {0, 1}
        t: Expressão escalar do epígrafo

    Returns:
        Restrição PSD 3×3
    """
    def escalar(expr):
        return cp.reshape(expr, (1, 1), order='F')

    e = np.zeros(2)
    e[indice] = 1.0
    e0, e1 = np.array([[e[0]]]), np.array([[e[1]]])
    bloco = cp.bmat([
        [escalar(F[0][0]), escalar(F[0][1]), e0],
        [escalar(F[0][1]), escalar(F[1][1]), e1],
        [e0, e1, escalar(t)],
    ])
    return bloco >> 0


class BackendCvxpy:
    """Backend baseado em cvxpy (CLARABEL por padrão, SCS como alternativa)"""

    def __init__(self, solver: Optional[str] = None, tolerancia_violacao: float = 1e-7,
                 alternativa: Optional[str] = 'SCS'):
        """
        Args:
            solver: Nome do solver cvxpy (DFRC_SOLVER sobrepõe; padrão CLARABEL)
            tolerancia_violacao: Violação escalonada máxima aceita
            alternativa: Solver usado se o principal não estiver instalado ou falhar
        """
        load_dotenv()
        self.solver = (os.getenv('DFRC_SOLVER') or solver or 'CLARABEL').upper()
        self.tolerancia_violacao = tolerancia_violacao
        self.alternativa = alternativa.upper() if alternativa else None

    def _candidatos(self) -> List[str]:
        instalados = set(cp.installed_solvers())
        candidatos = [s for s in (self.solver, self.alternativa) if s and s in instalados]
        if not candidatos:
            raise ErroSolver(
                f"Nenhum solver disponível entre {self.solver}/{self.alternativa} "
                f"(instalados: {sorted(instalados)})"
            )
        if candidatos[0] != self.solver:
            logger.warning(f"Solver {self.solver} não instalado; usando {candidatos[0]}")
        return candidatos

    def resolver(self, programa: ProgramaConico) -> SolucaoConica:
        """
        Resolve o programa e verifica a violação escalonada das restrições

        Returns:
            SolucaoConica com status 'otimo', 'inviavel' ou 'ilimitado'

        Raises:
            ErroSolver: falha do solver ou violação acima da tolerância
        """
        problema = cp.Problem(cp.Minimize(programa.objetivo), programa.restricoes)

        ultimo_erro = None
        for nome in self._candidatos():
            try:
                problema.solve(solver=nome, **_OPCOES_SOLVER.get(nome, {}))
            except cp.SolverError as e:
                logger.warning(f"Solver {nome} falhou: {e}")
                ultimo_erro = e
                continue

            status = _MAPA_STATUS.get(problema.status)
            if status is None:
                logger.warning(f"Solver {nome} retornou status {problema.status}")
                ultimo_erro = ErroSolver(f"Status {problema.status} do solver {nome}")
                continue
            if problema.status == cp.OPTIMAL_INACCURATE:
                logger.warning(f"Solver {nome}: solução imprecisa")
            return self._montar_solucao(programa, problema, status, nome)

        raise ErroSolver(f"Nenhum solver resolveu o subproblema: {ultimo_erro}")

    def _montar_solucao(self, programa: ProgramaConico, problema: cp.Problem,
                        status: str, nome: str) -> SolucaoConica:
        if status != STATUS_OTIMO:
            logger.debug(f"Subproblema {status} ({nome})")
            return SolucaoConica(status=status, status_solver=problema.status,
                                 valor_objetivo=None, solver=nome)

        residuos = residuos_escalonados(programa)
        pior = max(residuos.values(), default=0.0)
        if pior > self.tolerancia_violacao:
            raise ErroSolver(
                f"Violação escalonada {pior:.3e} acima de {self.tolerancia_violacao:.1e} ({nome})",
                residuos,
            )

        valores = {n: np.array(v.value) for n, v in programa.variaveis.items()}
        return SolucaoConica(
            status=status,
            status_solver=problema.status,
            valor_objetivo=float(problema.value),
            valores=valores,
            residuos=residuos,
            solver=nome,
        )


def residuos_escalonados(programa: ProgramaConico) -> Dict[str, float]:
    """
    Violação máxima por grupo, escalonada por 1 + max|argumento|
    """
    residuos = {}
    for grupo, restricoes in programa.grupos.items():
        pior = 0.0
        for c in restricoes:
            violacao = np.max(np.atleast_1d(c.violation())) if c.size else 0.0
            escala = 1.0 + max(
                (float(np.max(np.abs(a.value))) for a in c.args if a.value is not None),
                default=0.0,
            )
            pior = max(pior, float(violacao) / escala)
        residuos[grupo] = pior
    return residuos


def resolver_subproblema(programa: ProgramaConico,
                         backend: Optional[BackendConico] = None) -> SolucaoConica:
    """Resolve com o backend dado (BackendCvxpy por padrão)"""
    backend = backend or BackendCvxpy()
    solucao = backend.resolver(programa)
    logger.debug(
        f"Subproblema: status={solucao.status} solver={solucao.solver} "
        f"objetivo={solucao.valor_objetivo}"
    )
    return solucao
