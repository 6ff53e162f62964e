#!/usr/bin/env python3
"""
Script principal: projeto de beamforming DFRC para satélite LEO multifeixe
Subcomandos optimize, sweep, estimate, validate e plot
"""

import argparse
import logging
import os
import sys

import numpy as np

from src.cache_manager import CacheManager
from src.cenario import Estrategia, carregar_cenario, montar_geometrias
from src.estimador import estimar, salvar_espectro_csv, salvar_espectro_doppler_csv, salvar_grade_json
from src.excecoes import ErroDFRC, ErroInviabilidade, ArgumentoInvalidoError
from src.experimentos import (
    carregar_especificacao,
    executar_experimento_estimacao,
    executar_validacao,
    executar_varredura_rcrb,
    otimizar_com_cache,
)
from src.graficos import GeradorGraficos
from src.otimizador import otimizar_cenario
from src.sinais import salvar_eco_binario, simular_cpi
from src.taxas import ConjuntoPrecoders
from src.utils import (
    carregar_json,
    configurar_logging,
    criar_diretorios,
    gerar_nome_arquivo,
    salvar_json,
)

logger = logging.getLogger(__name__)

SAIDA_PADRAO = 'resultados'


def _criar_parser() -> argparse.ArgumentParser:
    comuns = argparse.ArgumentParser(add_help=False)
    comuns.add_argument('--config', type=str, help='Arquivo YAML do cenário (padrão: cenário de referência)')
    comuns.add_argument('--out', type=str,
                        help='Diretório de saída (padrão: resultados, ou o "saida" do experimento)')
    comuns.add_argument('--debug', action='store_true', help='Ativar modo debug (logs detalhados)')

    cenario = argparse.ArgumentParser(add_help=False)
    cenario.add_argument('--strategy', type=str, default='rsma', help='rsma, sdma ou radar (padrão: rsma)')
    cenario.add_argument('--rth', type=float, help='Taxa mínima R_th em bps/Hz')
    cenario.add_argument('--snr', type=float, help='SNR radar em dB')
    cenario.add_argument('--seed', type=int, help='Semente')

    parser = argparse.ArgumentParser(
        description='Projeto de beamforming DFRC (RSMA/SDMA) com minimização do CRB',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Exemplos de uso:
  # Otimizar o cenário de referência com RSMA e R_th = 4 bps/Hz
  python main.py optimize --config config/referencia.yaml --strategy rsma --rth 4

  # Varredura de RCRB definida em YAML
  python main.py sweep --experimento config/experimento_rth.yaml

  # Estimar (F_D, θ, φ) com beamformers salvos
  python main.py estimate --beamformers resultados/otimizacao_rsma_4p00.json --seed 3

  # Verificar invariantes e gerar gráficos
  python main.py validate
  python main.py plot --out resultados
        """
    )
    sub = parser.add_subparsers(dest='comando', required=True)

    sub.add_parser('optimize', parents=[comuns, cenario], help='Otimiza um cenário e salva o resultado em JSON')

    sweep = sub.add_parser('sweep', parents=[comuns], help='Varredura de RCRB (R_th ou SNR)')
    sweep.add_argument('--experimento', type=str, required=True, help='Especificação YAML da varredura')
    sweep.add_argument('--workers', type=int, help='Processos em paralelo (padrão: DFRC_WORKERS)')
    sweep.add_argument('--sem-cache', action='store_true', help='Não usar o cache de otimizações')

    estimate = sub.add_parser('estimate', parents=[comuns, cenario], help='Simula um CPI e estima (F_D, θ, φ)')
    estimate.add_argument('--beamformers', type=str, help='JSON de beamformers (ou resultado do optimize)')
    estimate.add_argument('--experimento', type=str, help='Experimento Monte-Carlo de estimação (YAML)')
    estimate.add_argument('--grid-step-deg', type=float, help='Passo da grade angular em graus')
    estimate.add_argument('--salvar-eco', action='store_true', help='Salvar o eco simulado em formato binário')
    estimate.add_argument('--workers', type=int, help='Processos em paralelo (padrão: DFRC_WORKERS)')
    estimate.add_argument('--sem-cache', action='store_true', help='Não usar o cache de otimizações')

    validate = sub.add_parser('validate', parents=[comuns], help='Executa a suíte de invariantes')
    validate.add_argument('--seed', type=int, default=0, help='Semente das instâncias aleatórias')
    validate.add_argument('--rapida', action='store_true', help='Omite as verificações que executam o SCA')

    plot = sub.add_parser('plot', parents=[comuns], help='Gera gráficos a partir dos CSVs de saída')
    plot.add_argument('--graficos', type=str, help='Diretório das figuras (padrão: o mesmo de --out)')
    return parser


def _saida_do_experimento(args) -> bool:
    """sweep e estimate --experimento gravam no 'saida' do YAML quando --out é omitido"""
    return args.comando == 'sweep' or (args.comando == 'estimate' and bool(args.experimento))


def _cenario_dos_argumentos(args):
    cfg = carregar_cenario(args.config)
    alteracoes = {}
    if getattr(args, 'rth', None) is not None:
        alteracoes['r_th'] = args.rth
    if getattr(args, 'snr', None) is not None:
        alteracoes['snr_radar_db'] = args.snr
    if getattr(args, 'seed', None) is not None and args.comando == 'optimize':
        alteracoes['semente'] = args.seed
    return cfg.com(**alteracoes) if alteracoes else cfg


def comando_optimize(args) -> int:
    cfg = _cenario_dos_argumentos(args)
    estrategia = Estrategia.de_texto(args.strategy)

    resultado = otimizar_cenario(cfg, estrategia)
    dados = resultado.to_dict()
    dados['hash_cenario'] = cfg.hash()
    dados['cenario'] = cfg.to_dict()

    caminho = os.path.join(args.out, gerar_nome_arquivo('otimizacao', estrategia.value, cfg.r_th, extensao='json'))
    salvar_json(dados, caminho)

    logger.info("✅ Otimização concluída!")
    logger.info(f"   📄 {caminho}")
    logger.info(f"   🎯 RCRB θ: {resultado.crb.rcrb_theta_graus:.4e}°  φ: {resultado.crb.rcrb_phi_graus:.4e}°")
    if resultado.taxas is not None:
        logger.info(f"   📶 Taxa mínima: {resultado.taxas.taxas_totais.min():.3f} bps/Hz")
    return 0


def comando_sweep(args) -> int:
    spec = carregar_especificacao(args.experimento)
    if args.out is not None:
        spec.saida = args.out
    cache_dir = None if args.sem_cache else '.cache/otimizacoes'

    linhas = executar_varredura_rcrb(spec, args.workers, cache_dir)
    logger.info(f"📁 Resultados salvos em: {spec.saida}/")
    for linha in linhas:
        if linha.rcrb_theta_graus is None:
            logger.info(f"   {linha.estrategia:6s} {linha.variavel}={linha.valor:g} semente={linha.semente}: {linha.status}")
        else:
            logger.info(
                f"   {linha.estrategia:6s} {linha.variavel}={linha.valor:g} semente={linha.semente}: "
                f"RCRB θ={linha.rcrb_theta_graus:.4e}° φ={linha.rcrb_phi_graus:.4e}°"
            )
    return 0


def _carregar_beamformers(caminho: str) -> ConjuntoPrecoders:
    dados = carregar_json(caminho)
    if 'beamformers' in dados:
        dados = dados['beamformers']
    return ConjuntoPrecoders.from_dict(dados)


def comando_estimate(args) -> int:
    passo = np.radians(args.grid_step_deg) if args.grid_step_deg else None
    cache_dir = None if args.sem_cache else '.cache/otimizacoes'

    if args.experimento:
        spec = carregar_especificacao(args.experimento)
        if args.out is not None:
            spec.saida = args.out
        saida = executar_experimento_estimacao(spec, passo, args.workers, cache_dir)
        for linha in saida['agregado']:
            logger.info(
                f"   {linha['estrategia']:6s} {spec.variavel}={linha['valor']:g}: "
                f"RMSE θ={linha['rmse_theta_graus']:.4f}° φ={linha['rmse_phi_graus']:.4f}° "
                f"Doppler {linha['taxa_acerto_doppler']:.0%} ângulo {linha['taxa_acerto_angulo']:.0%}"
            )
        return 0

    cfg = _cenario_dos_argumentos(args)
    if args.beamformers:
        bf = _carregar_beamformers(args.beamformers)
    else:
        estrategia = Estrategia.de_texto(args.strategy)
        cache = CacheManager(cache_dir) if cache_dir else None
        bf = ConjuntoPrecoders.from_dict(otimizar_com_cache(cfg, estrategia, cache)['beamformers'])
    if bf.n_feeds != cfg.n_feeds:
        raise ArgumentoInvalidoError(f"Beamformers com {bf.n_feeds} feeds para cenário com {cfg.n_feeds}")

    semente = args.seed if args.seed is not None else cfg.semente
    geometrias = montar_geometrias(cfg)
    conjunto = simular_cpi(cfg, bf, geometrias, np.random.default_rng(semente))
    resultado = estimar(conjunto, cfg, geometrias, passo)

    rotulo = bf.estrategia.value
    salvar_espectro_csv(resultado, os.path.join(args.out, gerar_nome_arquivo('espectro', rotulo, cfg.r_th, semente)))
    salvar_espectro_doppler_csv(resultado, os.path.join(args.out, gerar_nome_arquivo('doppler', rotulo, cfg.r_th, semente)))
    salvar_grade_json(resultado, os.path.join(args.out, gerar_nome_arquivo('estimacao', rotulo, cfg.r_th, semente, 'json')))
    if args.salvar_eco:
        salvar_eco_binario(conjunto, os.path.join(args.out, gerar_nome_arquivo('eco', rotulo, cfg.r_th, semente, 'bin')))

    logger.info("✅ Estimação concluída!")
    logger.info(f"   📡 F̂_D = {resultado.doppler_hz:.1f} Hz (verdadeiro {cfg.doppler_hz:.1f} Hz)")
    logger.info(
        f"   🎯 θ̂ = {np.degrees(resultado.theta):.3f}°, φ̂ = {np.degrees(resultado.phi):.3f}° "
        f"(verdadeiro {np.degrees(cfg.theta_alvo_rad):.3f}°, {np.degrees(cfg.phi_alvo_rad):.3f}°)"
    )
    return 0


def comando_validate(args) -> int:
    cfg = carregar_cenario(args.config)
    verificacoes = executar_validacao(cfg, args.seed, not args.rapida, args.out)
    falhas = [v.nome for v in verificacoes if not v.ok]
    if falhas:
        logger.error(f"❌ {len(falhas)} verificação(ões) falharam: {', '.join(falhas)}")
        return 1
    logger.info(f"✅ {len(verificacoes)} verificação(ões) aprovadas")
    return 0


def comando_plot(args) -> int:
    graficos = GeradorGraficos().gerar_graficos(args.out, args.graficos)
    for nome, caminho in graficos.items():
        logger.info(f"   📈 {nome}: {caminho}")
    return 0 if graficos else 1


COMANDOS = {
    'optimize': comando_optimize,
    'sweep': comando_sweep,
    'estimate': comando_estimate,
    'validate': comando_validate,
    'plot': comando_plot,
}


def main(argv=None) -> int:
    """Função principal"""
    args = _criar_parser().parse_args(argv)

    nivel_log = 'DEBUG' if args.debug else 'INFO'
    configurar_logging(nivel_log, f'logs/dfrc_{args.comando}.log')
    if args.out is None and not _saida_do_experimento(args):
        args.out = SAIDA_PADRAO
    if args.out is not None:
        criar_diretorios([args.out])

    logger.info("=" * 70)
    logger.info(f"DFRC LEO MULTIFEIXE - {args.comando.upper()}")
    logger.info("=" * 70)

    try:
        return COMANDOS[args.comando](args)

    except ErroInviabilidade as e:
        logger.error(f"❌ Problema inviável: {e}", exc_info=args.debug)
        return 2

    except FileNotFoundError as e:
        logger.error(f"❌ Arquivo não encontrado: {e}")
        return 1

    except KeyboardInterrupt:
        logger.warning("\n⚠️  Processo interrompido pelo usuário")
        return 130

    except ErroDFRC as e:
        logger.error(f"❌ {type(e).__name__}: {e}", exc_info=args.debug)
        return 1

    except Exception as e:
        logger.error(f"❌ Erro fatal: {e}", exc_info=args.debug)
        return 1


if __name__ == '__main__':
    sys.exit(main())
