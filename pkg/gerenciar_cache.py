#!/usr/bin/env python3
"""
Utilitário para gerenciar o cache de resultados do otimizador

Ações: stats, list (pontos otimizados em cache), clear e clear-old
"""

import sys
import argparse
from typing import Optional

from src.cache_manager import CacheManager
from src.experimentos import CATEGORIA_CACHE


def _criar_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Gerenciador do cache de otimizações DFRC')
    parser.add_argument('action', choices=['stats', 'list', 'clear', 'clear-old'],
                        help='Ação a executar')
    parser.add_argument('--dir', type=str, default='.cache/otimizacoes',
                        help='Diretório do cache (padrão: .cache/otimizacoes)')
    parser.add_argument('--hours', type=int, default=24,
                        help='Para clear-old: remove entradas mais antigas que X horas (padrão: 24)')
    parser.add_argument('--estrategia', type=str,
                        help='Para list: mostra só uma estratégia (rsma, sdma, radar)')
    parser.add_argument('--sim', action='store_true',
                        help='Para clear: não pedir confirmação')
    return parser


def _mostrar_stats(cache: CacheManager) -> int:
    stats = cache.stats()
    print("\n" + "=" * 60)
    print("📊 ESTATÍSTICAS DO CACHE")
    print("=" * 60)
    print(f"Status: {'✅ Habilitado' if stats['enabled'] else '❌ Desabilitado'}")
    if stats['enabled']:
        print(f"Diretório: {stats.get('cache_dir', 'N/A')}")
        print(f"Arquivos: {stats['total_files']}")
        print(f"Tamanho: {stats['total_size_mb']} MB")
        for categoria, total in sorted(stats['categorias'].items()):
            print(f"  {categoria}: {total}")
    print("=" * 60)
    return 0


def _listar(cache: CacheManager, estrategia: Optional[str] = None) -> int:
    entradas = cache.entradas(CATEGORIA_CACHE)
    if estrategia:
        entradas = [e for e in entradas if e['params'].get('estrategia') == estrategia.lower()]
    if not entradas:
        print("Nenhuma otimização em cache")
        return 0

    print(f"{'estratégia':10s} {'R_th':>6s} {'semente':>7s} {'status':16s} {'RCRB θ (°)':>12s}  cenário")
    for entrada in entradas:
        params, dados = entrada['params'], entrada.get('data') or {}
        rcrb = (dados.get('crb') or {}).get('rcrb_theta_graus')
        rcrb_txt = f"{rcrb:12.4e}" if rcrb is not None else f"{'-':>12s}"
        print(f"{params['estrategia']:10s} {params['r_th']:6.2f} {params['semente']!s:>7s} "
              f"{dados.get('status', '?'):16s} {rcrb_txt}  {params['hash_cenario']}")
    print(f"\n{len(entradas)} entrada(s)")
    return 0


def _limpar(cache: CacheManager, horas: Optional[int] = None, confirmado: bool = False) -> int:
    if not cache.enabled:
        print("❌ Cache desabilitado (CACHE_ENABLED=false)")
        return 1

    if horas is not None:
        removidos = cache.clear(older_than_hours=horas)
        print(f"✅ {removidos} arquivo(s) mais antigos que {horas}h removido(s)")
        return 0

    resposta = 's' if confirmado else input("⚠️  Deseja limpar TODO o cache? (s/N): ")
    if resposta.lower() != 's':
        print("❌ Cancelado")
        return 0
    print(f"✅ {cache.clear()} arquivo(s) removido(s)")
    return 0


def main(argv=None) -> int:
    args = _criar_parser().parse_args(argv)
    cache = CacheManager(cache_dir=args.dir)

    if args.action == 'stats':
        return _mostrar_stats(cache)
    if args.action == 'list':
        return _listar(cache, args.estrategia)
    if args.action == 'clear-old':
        return _limpar(cache, horas=args.hours)
    return _limpar(cache, confirmado=args.sim)


if __name__ == '__main__':
    sys.exit(main())
