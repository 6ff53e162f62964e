"""
Funções auxiliares para o sistema
Gerenciamento de logging, configurações, persistência JSON/CSV, hashing, etc.
"""

import os
import csv
import json
import yaml
import hashlib
import logging
from pathlib import Path
from typing import Dict, Any, Iterable, List, Optional, Sequence

import numpy as np
from dotenv import load_dotenv


def configurar_logging(nivel: str = "INFO", arquivo_log: Optional[str] = None) -> None:
    """
    Configura o sistema de logging

    Args:
        nivel: Nível de log (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        arquivo_log: Caminho para arquivo de log (opcional)
    """
    log_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    date_format = '%Y-%m-%d %H:%M:%S'

    handlers = [logging.StreamHandler()]

    if arquivo_log:
        # Cria diretório se não existir
        log_dir = os.path.dirname(arquivo_log)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
        handlers.append(logging.FileHandler(arquivo_log, encoding='utf-8'))

    logging.basicConfig(
        level=getattr(logging, nivel.upper()),
        format=log_format,
        datefmt=date_format,
        handlers=handlers
    )

    # Reduz verbosidade de bibliotecas externas
    logging.getLogger('matplotlib').setLevel(logging.WARNING)
    logging.getLogger('cvxpy').setLevel(logging.WARNING)


def carregar_yaml(caminho: str) -> Dict[str, Any]:
    """
    Carrega arquivo YAML

    Args:
        caminho: Caminho para o arquivo

    Returns:
        Dicionário com o conteúdo (vazio se o arquivo estiver vazio)
    """
    if not os.path.exists(caminho):
        raise FileNotFoundError(f"Arquivo de configuração não encontrado: {caminho}")

    with open(caminho, 'r', encoding='utf-8') as f:
        dados = yaml.safe_load(f)

    return dados or {}


def criar_diretorios(diretorios: list) -> None:
    """
    Cria diretórios se não existirem

    Args:
        diretorios: Lista de caminhos de diretórios
    """
    for diretorio in diretorios:
        Path(diretorio).mkdir(parents=True, exist_ok=True)


def para_json(valor: Any) -> Any:
    """
    Converte recursivamente tipos numpy/complexos para tipos serializáveis

    Complexos viram {"re": ..., "im": ...}; arrays complexos viram
    {"re": [...], "im": [...]}.
    """
    if isinstance(valor, dict):
        return {str(k): para_json(v) for k, v in valor.items()}
    if isinstance(valor, (list, tuple)):
        return [para_json(v) for v in valor]
    if isinstance(valor, np.ndarray):
        if np.iscomplexobj(valor):
            return {'re': valor.real.tolist(), 'im': valor.imag.tolist()}
        return valor.tolist()
    if isinstance(valor, (complex, np.complexfloating)):
        return {'re': float(valor.real), 'im': float(valor.imag)}
    if isinstance(valor, np.integer):
        return int(valor)
    if isinstance(valor, np.floating):
        return float(valor)
    if isinstance(valor, np.bool_):
        return bool(valor)
    return valor


def salvar_json(dados: Dict, caminho: str, identar: bool = True) -> None:
    """
    Salva dados em arquivo JSON

    Args:
        dados: Dicionário para salvar (tipos numpy são convertidos)
        caminho: Caminho do arquivo
        identar: Se deve identar o JSON
    """
    # Cria diretório se não existir
    dir_path = os.path.dirname(caminho)
    if dir_path:
        os.makedirs(dir_path, exist_ok=True)

    with open(caminho, 'w', encoding='utf-8') as f:
        json.dump(para_json(dados), f, ensure_ascii=False,
                  indent=2 if identar else None, sort_keys=True)


def carregar_json(caminho: str) -> Dict:
    """
    Carrega dados de arquivo JSON

    Args:
        caminho: Caminho do arquivo

    Returns:
        Dicionário com dados
    """
    if not os.path.exists(caminho):
        raise FileNotFoundError(f"Arquivo JSON não encontrado: {caminho}")

    with open(caminho, 'r', encoding='utf-8') as f:
        return json.load(f)


def salvar_csv(linhas: Iterable[Dict[str, Any]], caminho: str,
               colunas: Sequence[str]) -> None:
    """
    Salva linhas (dicionários) em CSV com colunas fixas

    Floats são escritos com repr() para que a saída seja reprodutível
    byte a byte.

    Args:
        linhas: Linhas a escrever
        caminho: Caminho do arquivo
        colunas: Ordem das colunas
    """
    dir_path = os.path.dirname(caminho)
    if dir_path:
        os.makedirs(dir_path, exist_ok=True)

    with open(caminho, 'w', encoding='utf-8', newline='') as f:
        escritor = csv.writer(f, lineterminator='\n')
        escritor.writerow(colunas)
        for linha in linhas:
            escritor.writerow([_formatar_celula(linha.get(c)) for c in colunas])


def carregar_csv(caminho: str) -> List[Dict[str, str]]:
    """Lê um CSV com cabeçalho como lista de dicionários (valores em texto)"""
    if not os.path.exists(caminho):
        raise FileNotFoundError(f"Arquivo CSV não encontrado: {caminho}")

    with open(caminho, 'r', encoding='utf-8', newline='') as f:
        return list(csv.DictReader(f))


def _formatar_celula(valor: Any) -> str:
    if valor is None:
        return ''
    if isinstance(valor, (float, np.floating)):
        return repr(float(valor))
    return str(valor)


def hash_dados(dados: Dict[str, Any], tamanho: int = 12) -> str:
    """
    Gera hash determinístico de um dicionário

    Args:
        dados: Dicionário serializável
        tamanho: Número de caracteres hexadecimais retornados

    Returns:
        Prefixo do hash MD5 da serialização ordenada
    """
    texto = json.dumps(para_json(dados), sort_keys=True)
    return hashlib.md5(texto.encode()).hexdigest()[:tamanho]


def gerar_nome_arquivo(prefixo: str, estrategia: str, valor: float,
                       semente: Optional[int] = None, extensao: str = "csv") -> str:
    """
    Gera nome de arquivo padronizado

    Args:
        prefixo: Prefixo (ex: espectro)
        estrategia: Estratégia (rsma, sdma, radar)
        valor: Valor da variável de varredura
        semente: Semente (opcional)
        extensao: Extensão do arquivo (sem ponto)

    Returns:
        Nome do arquivo (ex: espectro_rsma_4p00_s0.csv)
    """
    valor_limpo = f"{valor:.2f}".replace('-', 'm').replace('.', 'p')
    nome = f"{prefixo}_{estrategia}_{valor_limpo}"
    if semente is not None:
        nome += f"_s{semente}"
    return f"{nome}.{extensao}"


def obter_num_workers(padrao: int = 1) -> int:
    """
    Número de workers das varreduras (variável DFRC_WORKERS, aceita .env)

    Returns:
        Inteiro >= 1
    """
    load_dotenv()
    valor = os.getenv('DFRC_WORKERS')
    if not valor:
        return padrao
    try:
        return max(1, int(valor))
    except ValueError:
        logging.getLogger(__name__).warning(
            f"DFRC_WORKERS inválido ({valor!r}); usando {padrao}"
        )
        return padrao
