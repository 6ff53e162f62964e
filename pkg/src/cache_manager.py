"""
Cache de resultados do otimizador em arquivos JSON
Evita repetir execuções do SCA entre varreduras e o experimento de estimação
"""

import os
import json
import hashlib
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional
from datetime import datetime, timedelta

from dotenv import load_dotenv

logger = logging.getLogger(__name__)


class CacheManager:
    """Gerencia cache de resultados (dicionários JSON) por categoria e parâmetros"""

    def __init__(self, cache_dir: str = ".cache", ttl_hours: Optional[int] = None):
        """
        Inicializa o gerenciador de cache

        Args:
            cache_dir: Diretório onde os arquivos de cache serão salvos
            ttl_hours: Tempo de vida em horas (None = sem expiração)
        """
        load_dotenv()
        self.cache_dir = Path(cache_dir)
        self.ttl_seconds = ttl_hours * 3600 if ttl_hours is not None else None
        self.enabled = os.getenv('CACHE_ENABLED', 'true').lower() == 'true'

        if self.enabled:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            logger.debug(f"Cache habilitado: {self.cache_dir.absolute()}")
        else:
            logger.info("Cache desabilitado")

    def _generate_key(self, categoria: str, params: Dict) -> str:
        """
        Gera chave MD5 a partir da categoria e dos parâmetros

        Args:
            categoria: Tipo de resultado (ex: otimizacao)
            params: Parâmetros que identificam o resultado
        """
        params_str = json.dumps(params, sort_keys=True)
        return hashlib.md5(f"{categoria}:{params_str}".encode()).hexdigest()

    def _get_cache_path(self, key: str) -> Path:
        return self.cache_dir / f"{key}.json"

    def _is_expired(self, cache_data: Dict) -> bool:
        if self.ttl_seconds is None:
            return False
        if 'timestamp' not in cache_data:
            return True
        cache_time = datetime.fromisoformat(cache_data['timestamp'])
        return (datetime.now() - cache_time).total_seconds() > self.ttl_seconds

    def get(self, categoria: str, params: Dict) -> Optional[Any]:
        """
        Obtém resultado do cache

        Returns:
            Dados em cache ou None se não houver/expirado
        """
        if not self.enabled:
            return None

        cache_path = self._get_cache_path(self._generate_key(categoria, params))
        if not cache_path.exists():
            logger.debug(f"Cache miss: {categoria} {params}")
            return None

        try:
            with open(cache_path, 'r', encoding='utf-8') as f:
                cache_data = json.load(f)

            if self._is_expired(cache_data):
                logger.debug(f"Cache expirado: {categoria}")
                cache_path.unlink()
                return None

            logger.debug(f"Cache hit: {categoria} {params}")
            return cache_data.get('data')

        except (OSError, ValueError) as e:
            logger.warning(f"Erro ao ler cache: {e}")
            return None

    def set(self, categoria: str, params: Dict, data: Any) -> None:
        """Armazena resultado no cache"""
        if not self.enabled:
            return

        cache_path = self._get_cache_path(self._generate_key(categoria, params))
        cache_data = {
            'categoria': categoria,
            'params': params,
            'data': data,
            'timestamp': datetime.now().isoformat()
        }

        try:
            with open(cache_path, 'w', encoding='utf-8') as f:
                json.dump(cache_data, f, ensure_ascii=False)
            logger.debug(f"Cache salvo: {categoria} {params}")
        except (OSError, TypeError) as e:
            logger.warning(f"Erro ao salvar cache: {e}")

    def clear(self, older_than_hours: Optional[int] = None) -> int:
        """
        Limpa arquivos de cache

        Args:
            older_than_hours: Remove apenas entradas mais antigas que X horas

        Returns:
            Número de arquivos removidos
        """
        if not self.cache_dir.exists():
            return 0

        removed = 0
        cutoff_time = None
        if older_than_hours is not None:
            cutoff_time = datetime.now() - timedelta(hours=older_than_hours)

        for cache_file in self.cache_dir.glob("*.json"):
            try:
                if cutoff_time:
                    with open(cache_file, 'r', encoding='utf-8') as f:
                        cache_data = json.load(f)
                    cache_time = datetime.fromisoformat(cache_data.get('timestamp', '2000-01-01'))
                    if cache_time >= cutoff_time:
                        continue

                cache_file.unlink()
                removed += 1

            except (OSError, ValueError) as e:
                logger.warning(f"Erro ao processar {cache_file}: {e}")

        logger.info(f"Cache limpo: {removed} arquivo(s) removido(s)")
        return removed

    def entradas(self, categoria: Optional[str] = None) -> List[Dict[str, Any]]:
        """
        Lista as entradas gravadas, mais antigas primeiro

        Args:
            categoria: Filtra por categoria (None = todas)

        Returns:
            Dicionários com categoria, params, timestamp e data
        """
        if not self.cache_dir.exists():
            return []

        entradas = []
        for cache_file in self.cache_dir.glob("*.json"):
            try:
                with open(cache_file, 'r', encoding='utf-8') as f:
                    cache_data = json.load(f)
            except (OSError, ValueError) as e:
                logger.warning(f"Entrada ilegível {cache_file.name}: {e}")
                continue
            if categoria is None or cache_data.get('categoria') == categoria:
                entradas.append(cache_data)
        return sorted(entradas, key=lambda e: e.get('timestamp', ''))

    def stats(self) -> Dict[str, Any]:
        """Estatísticas do cache (arquivos por categoria e tamanho)"""
        if not self.cache_dir.exists():
            return {'enabled': self.enabled, 'total_files': 0, 'total_size_mb': 0, 'categorias': {}}

        cache_files = list(self.cache_dir.glob("*.json"))
        categorias: Dict[str, int] = {}
        for cache_file in cache_files:
            try:
                with open(cache_file, 'r', encoding='utf-8') as f:
                    categoria = json.load(f).get('categoria', '?')
            except (OSError, ValueError):
                categoria = '?'
            categorias[categoria] = categorias.get(categoria, 0) + 1

        total_size = sum(f.stat().st_size for f in cache_files)
        return {
            'enabled': self.enabled,
            'cache_dir': str(self.cache_dir.absolute()),
            'total_files': len(cache_files),
            'total_size_mb': round(total_size / 1024 / 1024, 2),
            'ttl_hours': self.ttl_seconds / 3600 if self.ttl_seconds else None,
            'categorias': categorias,
        }
