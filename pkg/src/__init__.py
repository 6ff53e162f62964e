"""
Projeto de beamforming DFRC para satélite LEO multifeixe
Minimização do CRB angular sob restrições de taxa RSMA/SDMA e validação
por simulação da cadeia de recepção radar
"""

__version__ = "1.0.0"
