from dataclasses import dataclass, field
from typing import List
from enum import Enum, auto


class Veredito(Enum):
    """Resultado da comparação entre o limite c²/4 e a curva λ₁(r)."""
    PASSOU = auto()         # todo λ₁(r) acima de c²/4 - ε
    FALHOU = auto()         # algum λ₁(r) abaixo, ou c instável sob refinamento
    NAO_APLICAVEL = auto()  # c ≤ 0: o teorema não afirma nada


class MetodoEspectral(Enum):
    """Métodos disponíveis para calcular λ₁ de bolas geodésicas."""
    RADIAL = auto()  # Sturm–Liouville radial (variedades rotacionalmente simétricas)
    FEM = auto()     # elementos finitos P1 ponderados pela métrica (superfícies)


@dataclass
class Configuracao:
    """Parâmetros numéricos globais do verificador."""
    VERSAO: str = "1.0.0"

    # ==============================
    # DIFERENCIAÇÃO
    # ==============================
    # Passo das diferenças centrais (oráculo): h = PASSO_FD * (1 + |p|)
    PASSO_FD: float = 1e-4
    # Pontos a menos de MARGEM_PASSOS * h da borda da carta são rejeitados
    MARGEM_PASSOS: float = 2.0

    # ==============================
    # TOLERÂNCIAS
    # ==============================
    TOL_SIMETRIA: float = 1e-12
    TOL_IDENTIDADE: float = 1e-6
    TOL_PISO: float = 1e-8
    TOL_ORTOGONALIDADE: float = 1e-10

    # Normas de operador (esfera de Fibonacci + subida de gradiente projetada)
    DIRECOES_POR_SLOT: int = 64
    PASSOS_SUBIDA: int = 20

    # ==============================
    # AMOSTRAGEM
    # ==============================
    SEMENTE_PADRAO: int = 20240601
    AMOSTRAS_VERIFICACAO: int = 100
    AMOSTRAS_CONSTANTE_C: int = 500
    FATOR_REFINAMENTO_C: int = 4
    TOL_CONCORDANCIA_C: float = 0.01
    # 2-planos sorteados para K_M, K̄ e o teste de curvatura hiperbólica
    PLANOS_CURVATURA: int = 100
    # Meia-largura da caixa de amostragem nas cartas dos modelos
    CAIXA_AMOSTRAGEM: float = 1.5
    # Meia-largura da caixa de domínio das cartas hiperbólicas
    LIMITE_CARTA: float = 60.0
    # Pontos usados para estimar inf/sup de w′ no modelo de linha warped
    AMOSTRAS_DERIVADA_W: int = 4001

    # ==============================
    # ESPECTRAL
    # ==============================
    GRADE_RADIAL: int = 400
    GRADE_MINIMA: int = 16
    MAX_ITERACOES_INVERSA: int = 500
    TOL_RESIDUO_INVERSA: float = 1e-10
    NIVEIS_FEM: int = 3
    ANEIS_FEM: int = 8
    RAIOS_FEM: int = 32
    TOL_MONOTONIA: float = 1e-8

    # ==============================
    # SAÍDA
    # ==============================
    DIRETORIO_SAIDA: str = "relatorios"
    DIGITOS_CSV: int = 12
    COLUNAS_CSV: List[str] = field(default_factory=lambda: [
        'r', 'lambda1', 'mesh_parameter', 'error_estimate'
    ])
    VERBOSE: bool = False

    @property
    def FORMATO_CSV(self) -> str:
        """Formato printf para os reais do CSV (dígitos significativos)."""
        return f"%.{self.DIGITOS_CSV}g"

    def passo_fd(self, norma_ponto: float) -> float:
        """Passo das diferenças centrais no ponto de norma dada."""
        return self.PASSO_FD * (1.0 + norma_ponto)

    def __post_init__(self):
        if self.GRADE_RADIAL < self.GRADE_MINIMA:
            raise ValueError("GRADE_RADIAL deve ser ≥ GRADE_MINIMA")
        if self.FATOR_REFINAMENTO_C < 1:
            raise ValueError("FATOR_REFINAMENTO_C deve ser ≥ 1")


# Instância global de configuração
CONFIG = Configuracao()
