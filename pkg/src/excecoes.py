"""
Exceções do sistema de projeto de beamforming DFRC
Cada categoria de falha tem sua própria classe para que a CLI e as
varreduras possam decidir o código de saída / status do ponto
"""

from typing import Dict, Optional


class ErroDFRC(Exception):
    """Raiz de todas as exceções do pacote"""


class ArgumentoInvalidoError(ErroDFRC, ValueError):
    """Argumento fora do domínio válido"""


class ErroConfiguracao(ArgumentoInvalidoError):
    """Arquivo de configuração malformado"""

    def __init__(self, chave: str, mensagem: str):
        self.chave = chave
        super().__init__(f"Configuração inválida na chave '{chave}': {mensagem}")


class ErroRestricaoViolada(ErroDFRC):
    """Restrição de taxa violada por um usuário"""

    def __init__(self, usuario: int, mensagem: str):
        self.usuario = usuario
        super().__init__(f"Usuário {usuario}: {mensagem}")


class AlvoNaoIdentificavelError(ErroDFRC):
    """FIM singular: R_X não carrega informação em alguma direção angular"""


class DirecaoInobservavelError(ErroDFRC):
    """Denominador de α̂ nulo: direção fora do espaço transmitido"""


class ErroNumerico(ErroDFRC):
    """Falha numérica (matriz singular mesmo após carga diagonal)"""


class ErroSolver(ErroDFRC):
    """Falha do backend cônico"""

    def __init__(self, mensagem: str, residuos: Optional[Dict[str, float]] = None):
        self.residuos = residuos or {}
        if self.residuos:
            detalhe = ", ".join(f"{k}={v:.3e}" for k, v in sorted(self.residuos.items()))
            mensagem = f"{mensagem} (resíduos: {detalhe})"
        super().__init__(mensagem)


class ErroInviabilidade(ErroDFRC):
    """Subproblema inviável ou R_th inatingível"""


class ErroInterno(ErroDFRC):
    """Violação de invariante interno (ex.: objetivo SCA crescente)"""


class ErroPostoUm(ErroDFRC):
    """Matriz elevada não convergiu para posto um"""

    def __init__(self, razao: float, mensagem: str = ""):
        self.razao = razao
        super().__init__(
            mensagem or f"Razão de posto {razao:.6f} abaixo do mínimo exigido"
        )
