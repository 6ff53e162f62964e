"""
Exemplo de varredura de RCRB contra R_th montada em código
(equivalente a main.py sweep com um YAML)
"""

import sys
import os

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.cenario import ConfigCenario, Estrategia
from src.experimentos import EspecificacaoExperimento, executar_varredura_rcrb
from src.utils import configurar_logging

configurar_logging('INFO')


def main():
    spec = EspecificacaoExperimento(
        cenario=ConfigCenario(n_feeds=4, n_usuarios=4, n_rx=6),
        variavel='r_th',
        valores=[0.5, 1.0, 1.5, 2.0],
        estrategias=[Estrategia.RSMA, Estrategia.SDMA],
        sementes=[0, 1],
        saida='output/exemplo_varredura',
    )

    linhas = executar_varredura_rcrb(spec, workers=2)

    print(f"\n{'estratégia':10s} {'R_th':>6s} {'semente':>8s} {'RCRB θ (°)':>12s} {'status':>16s}")
    for linha in linhas:
        rcrb = f"{linha.rcrb_theta_graus:.4e}" if linha.rcrb_theta_graus is not None else '-'
        print(f"{linha.estrategia:10s} {linha.valor:6.2f} {linha.semente:8d} {rcrb:>12s} {linha.status:>16s}")


if __name__ == '__main__':
    main()
