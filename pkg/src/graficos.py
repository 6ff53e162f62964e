"""
Gráficos dos resultados a partir dos CSVs emitidos
Curvas de RCRB, espectro Doppler e espectro angular 2-D
"""

import os
import glob
import logging
from typing import Dict, List, Optional

import matplotlib
matplotlib.use('Agg')  # Backend sem GUI
import matplotlib.pyplot as plt
import numpy as np

from .utils import carregar_csv

logger = logging.getLogger(__name__)

ROTULOS_VARIAVEL = {
    'r_th': 'R_th (bps/Hz)',
    'snr_radar_db': 'SNR radar (dB)',
}
ROTULOS_ESTRATEGIA = {
    'rsma': 'RSMA',
    'sdma': 'SDMA',
    'radar': 'Somente radar',
}


class GeradorGraficos:
    """Gera figuras PNG a partir dos CSVs de varredura e estimação"""

    def __init__(self, cores: Optional[Dict[str, str]] = None):
        """
        Args:
            cores: Cor por estratégia (rsma, sdma, radar)
        """
        self.cores = {'rsma': '#013c78', 'sdma': '#E74C3C', 'radar': '#27AE60'}
        self.cores.update(cores or {})
        self.cor_texto = '#2C3E50'

        plt.style.use('seaborn-v0_8-darkgrid')
        plt.rcParams['font.size'] = 10
        plt.rcParams['axes.labelsize'] = 10
        plt.rcParams['axes.titlesize'] = 12
        plt.rcParams['legend.fontsize'] = 9

    def gerar_graficos(self, diretorio: str, saida: Optional[str] = None) -> Dict[str, str]:
        """
        Gera todas as figuras possíveis para os CSVs de um diretório

        Args:
            diretorio: Diretório com rcrb_*.csv, espectro_*.csv e doppler_*.csv
            saida: Diretório das figuras (padrão: o mesmo)

        Returns:
            Dicionário nome -> caminho do PNG
        """
        saida = saida or diretorio
        os.makedirs(saida, exist_ok=True)
        graficos = {}

        for caminho in sorted(glob.glob(os.path.join(diretorio, 'rcrb_*.csv'))):
            nome = os.path.splitext(os.path.basename(caminho))[0]
            graficos[nome] = self.grafico_rcrb(caminho, os.path.join(saida, f"{nome}.png"))
        for caminho in sorted(glob.glob(os.path.join(diretorio, 'doppler_*.csv'))):
            nome = os.path.splitext(os.path.basename(caminho))[0]
            graficos[nome] = self.grafico_doppler(caminho, os.path.join(saida, f"{nome}.png"))
        for caminho in sorted(glob.glob(os.path.join(diretorio, 'espectro_*.csv'))):
            nome = os.path.splitext(os.path.basename(caminho))[0]
            graficos[nome] = self.grafico_espectro(caminho, os.path.join(saida, f"{nome}.png"))

        if not graficos:
            logger.warning(f"Nenhum CSV de resultados encontrado em {diretorio}")
        else:
            logger.info(f"✓ {len(graficos)} gráfico(s) gerado(s) em {saida}")
        return graficos

    def grafico_rcrb(self, caminho_csv: str, caminho_saida: str) -> str:
        """RCRB de θ e φ (média sobre sementes) contra a variável de varredura"""
        linhas = carregar_csv(caminho_csv)
        validas = [l for l in linhas if l['rcrb_theta_graus']]
        if not validas:
            return self._gerar_placeholder(caminho_saida, 'Nenhum ponto viável')

        variavel = validas[0]['variavel']
        fig, axes = plt.subplots(1, 2, figsize=(12, 5))

        for estrategia in dict.fromkeys(l['estrategia'] for l in validas):
            pontos: Dict[float, List[tuple]] = {}
            for l in validas:
                if l['estrategia'] == estrategia:
                    pontos.setdefault(float(l['valor']), []).append(
                        (float(l['rcrb_theta_graus']), float(l['rcrb_phi_graus']))
                    )
            valores = sorted(pontos)
            medias = np.array([np.mean(pontos[v], axis=0) for v in valores])
            for ax, coluna in zip(axes, range(2)):
                ax.semilogy(valores, medias[:, coluna], marker='o', linewidth=2,
                            color=self.cores.get(estrategia), label=ROTULOS_ESTRATEGIA.get(estrategia, estrategia))

        inviaveis = len(linhas) - len(validas)
        for ax, angulo in zip(axes, ('θ', 'φ')):
            ax.set_xlabel(ROTULOS_VARIAVEL.get(variavel, variavel), fontweight='bold', color=self.cor_texto)
            ax.set_ylabel(f'RCRB de {angulo} (graus)', fontweight='bold', color=self.cor_texto)
            ax.set_title(f'RCRB de {angulo}', fontweight='bold', color=self.cor_texto)
            ax.grid(True, alpha=0.3, which='both')
            ax.legend(loc='best')
        if inviaveis:
            axes[0].text(0.02, 0.02, f'{inviaveis} ponto(s) sem solução', transform=axes[0].transAxes,
                         fontsize=9, color=self.cores['sdma'])

        plt.tight_layout()
        plt.savefig(caminho_saida, dpi=150, bbox_inches='tight', facecolor='white')
        plt.close()
        return os.path.abspath(caminho_saida)

    def grafico_doppler(self, caminho_csv: str, caminho_saida: str) -> str:
        """Magnitude do espectro Doppler"""
        linhas = carregar_csv(caminho_csv)
        if not linhas:
            return self._gerar_placeholder(caminho_saida, 'Espectro Doppler vazio')

        frequencias = np.array([float(l['frequencia_hz']) for l in linhas]) / 1e3
        magnitude = np.array([float(l['magnitude']) for l in linhas])
        pico = int(np.argmax(magnitude))

        fig, ax = plt.subplots(figsize=(10, 5))
        ax.plot(frequencias, magnitude, color=self.cores['rsma'], linewidth=1.2)
        ax.axvline(frequencias[pico], color=self.cores['sdma'], linestyle='--', linewidth=1.5,
                   label=f'Pico: {frequencias[pico]:.2f} kHz')
        ax.set_xlabel('Frequência Doppler (kHz)', fontweight='bold', color=self.cor_texto)
        ax.set_ylabel('Magnitude da FFT', fontweight='bold', color=self.cor_texto)
        ax.set_title('Espectro Doppler', fontweight='bold', color=self.cor_texto)
        ax.legend(loc='upper right')
        ax.spines['top'].set_visible(False)
        ax.spines['right'].set_visible(False)

        plt.tight_layout()
        plt.savefig(caminho_saida, dpi=150, bbox_inches='tight', facecolor='white')
        plt.close()
        return os.path.abspath(caminho_saida)

    def grafico_espectro(self, caminho_csv: str, caminho_saida: str) -> str:
        """Mapa de calor de |α̂(θ, φ)|² em dB normalizado ao pico"""
        linhas = carregar_csv(caminho_csv)
        if not linhas:
            return self._gerar_placeholder(caminho_saida, 'Espectro angular vazio')

        thetas = np.unique([float(l['theta_graus']) for l in linhas])
        phis = np.unique([float(l['phi_graus']) for l in linhas])
        potencia = np.array([float(l['potencia']) for l in linhas]).reshape(thetas.size, phis.size)
        potencia_db = 10 * np.log10(np.maximum(potencia / potencia.max(), 1e-12))
        i, j = np.unravel_index(np.argmax(potencia), potencia.shape)

        fig, ax = plt.subplots(figsize=(9, 6))
        malha = ax.pcolormesh(phis, thetas, potencia_db, shading='nearest', cmap='viridis', vmin=-40, vmax=0)
        ax.plot(phis[j], thetas[i], marker='x', color='white', markersize=10, markeredgewidth=2,
                label=f'Pico: θ={thetas[i]:.2f}°, φ={phis[j]:.2f}°')
        fig.colorbar(malha, ax=ax, label='|α̂|² normalizado (dB)')
        ax.set_xlabel('φ (graus)', fontweight='bold', color=self.cor_texto)
        ax.set_ylabel('θ (graus)', fontweight='bold', color=self.cor_texto)
        ax.set_title('Espectro angular 2-D', fontweight='bold', color=self.cor_texto)
        ax.legend(loc='lower left')

        plt.tight_layout()
        plt.savefig(caminho_saida, dpi=150, bbox_inches='tight', facecolor='white')
        plt.close()
        return os.path.abspath(caminho_saida)

    def _gerar_placeholder(self, caminho_saida: str, texto: str) -> str:
        """Imagem simples com texto indicando ausência de dados"""
        fig, ax = plt.subplots(figsize=(6, 2))
        ax.text(0.5, 0.5, texto, ha='center', va='center', fontsize=12, color='#666666')
        ax.set_axis_off()
        plt.tight_layout()
        plt.savefig(caminho_saida, dpi=120, bbox_inches='tight', facecolor='white')
        plt.close()
        return os.path.abspath(caminho_saida)
