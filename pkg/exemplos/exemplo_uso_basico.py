"""
Exemplo de uso básico da biblioteca
Otimiza os beamformers RSMA de uma instância pequena, simula um CPI e estima o alvo
"""

import sys
import os

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import numpy as np

from src.cenario import ConfigCenario, Estrategia, montar_geometrias
from src.estimador import estimar
from src.otimizador import otimizar_cenario
from src.sinais import simular_cpi
from src.utils import configurar_logging

configurar_logging('INFO')

# Instância reduzida: 4 feeds, 4 usuários
CENARIO = ConfigCenario(
    n_feeds=4,
    n_usuarios=4,
    n_rx=6,
    r_th=1.0,
    n_simbolos=64,
    amostras_por_simbolo=16,
    passo_grade_rad=float(np.radians(1.0)),
)


def main():
    """Exemplo de uso básico"""
    print("=" * 70)
    print("EXEMPLO DE USO BÁSICO - OTIMIZAÇÃO E ESTIMAÇÃO")
    print("=" * 70)

    resultado = otimizar_cenario(CENARIO, Estrategia.RSMA)
    print(f"\nRCRB θ: {resultado.crb.rcrb_theta_graus:.4e}°")
    print(f"RCRB φ: {resultado.crb.rcrb_phi_graus:.4e}°")
    print(f"Taxas por usuário: {np.round(resultado.taxas.taxas_totais, 3)} bps/Hz")

    geometrias = montar_geometrias(CENARIO)
    conjunto = simular_cpi(CENARIO, resultado.beamformers, geometrias, np.random.default_rng(7))
    estimativa = estimar(conjunto, CENARIO, geometrias)

    print(f"\nF̂_D = {estimativa.doppler_hz:.1f} Hz")
    print(f"θ̂ = {np.degrees(estimativa.theta):.2f}°, φ̂ = {np.degrees(estimativa.phi):.2f}°")
    print(f"Pico/mediana do espectro: {estimativa.razao_pico_mediana:.1f}")


if __name__ == '__main__':
    main()
