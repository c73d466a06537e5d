"""
Hierarquia de exceções do verificador.

Erros geométricos e espectrais são condições matemáticas (hipótese violada,
malha ruim, não convergência); erros de configuração vêm do arquivo de cenário
e viram código de saída 2 na linha de comando.
"""
from typing import Optional


class ErroGeometria(Exception):
    """Base para falhas do motor geométrico."""


class MetricaNaoPositivaDefinida(ErroGeometria):
    """g(p) falhou na fatoração de Cholesky ou não é simétrica."""


class FronteiraDominio(ErroGeometria):
    """Ponto perto demais da borda da carta para diferenciar."""


class ConjuntoAmostralVazio(ErroGeometria):
    pass


class DimensaoInvalida(ErroGeometria, ValueError):
    pass


class CurvaturaInvalida(ErroGeometria, ValueError):
    pass


class DerivadaNaoPositiva(ErroGeometria):
    """w′(s) ≤ 0 em algum ponto amostrado."""

    def __init__(self, s: float, valor: float):
        self.s = s
        self.valor = valor
        super().__init__(f"w′({s:.6g}) = {valor:.6g} ≤ 0")


class AmostraForaDominio(ErroGeometria):
    pass


class HipoteseViolada(ErroGeometria):
    """Cota declarada no cenário não confere com a amostragem."""


class VetorNaoOrtogonal(ErroGeometria, ValueError):
    """Vetor passado ao sanduíche da Hessiana não é ortogonal a grad F̄."""


class PostoDeficiente(ErroGeometria):
    """A diferencial da imersão não tem posto m."""


class FibraDegenerada(ErroGeometria):
    """Posto vertical diferente de n−k."""


class ErroEspectral(Exception):
    """Base para falhas do motor de autovalores."""


class GradeGrossa(ErroEspectral):
    def __init__(self, estimativa: float, tolerancia: float):
        self.estimativa = estimativa
        self.tolerancia = tolerancia
        super().__init__(
            f"estimativa de Richardson {estimativa:.3e} excede a tolerância {tolerancia:.3e}"
        )


class MontagemSingular(ErroEspectral):
    pass


class NaoConvergencia(ErroEspectral):
    pass


class NaoMonotona(ErroEspectral):
    """λ₁(r) cresceu com r: problema de discretização."""


class FuncaoNula(ErroEspectral, ValueError):
    pass


class PontosInsuficientes(ErroEspectral):
    pass


class ErroConfiguracao(Exception):
    """Cenário inválido; carrega linha/coluna quando o parser informa."""

    def __init__(self, mensagem: str, linha: Optional[int] = None, coluna: Optional[int] = None):
        self.linha = linha
        self.coluna = coluna
        local = ""
        if linha is not None:
            local = f" (linha {linha}" + (f", coluna {coluna})" if coluna is not None else ")")
        super().__init__(mensagem + local)


class CenarioNaoSuportado(Exception):
    """Falta no cenário uma seção exigida pelo comando."""
