"""
Modelos pydantic dos relatórios estruturados (verificações, resíduos, limites).
"""
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_serializer, model_validator

from configuracao import Veredito


class RelatorioVerificacao(BaseModel):
    """Resultado de uma verificação amostral (identidade, sanduíche, piso...)."""
    nome: str = Field(..., description="Identificador da verificação")
    passou: bool = Field(..., description="True se nenhuma amostra violou a tolerância")
    n_amostras: int = Field(..., ge=0, description="Pontos avaliados")
    tolerancia: float = Field(..., ge=0.0, description="Tolerância absoluta usada")
    valor_min: float = Field(..., description="Menor valor amostrado da grandeza verificada")
    valor_max: float = Field(..., description="Maior valor amostrado da grandeza verificada")
    pior_margem: float = Field(..., description="Menor folga observada; negativa indica violação")
    violacoes: int = Field(default=0, ge=0, description="Número de amostras fora da tolerância")
    ponto_pior: List[float] = Field(default_factory=list, description="Ponto que atinge a pior margem")
    detalhes: Dict[str, Any] = Field(default_factory=dict, description="Informações adicionais")

    @classmethod
    def de_amostras(cls, nome, valores, margens, pontos, tolerancia, detalhes=None) -> "RelatorioVerificacao":
        """Monta o relatório a partir das séries; violação quando margem < −tolerância."""
        valores = np.asarray(valores, dtype=float)
        margens = np.asarray(margens, dtype=float)
        if valores.size == 0:
            return cls(nome=nome, passou=True, n_amostras=0, tolerancia=float(tolerancia),
                       valor_min=0.0, valor_max=0.0, pior_margem=0.0, detalhes=detalhes or {})
        i = int(np.argmin(margens))
        violacoes = int(np.sum(margens < -tolerancia))
        return cls(
            nome=nome,
            passou=violacoes == 0,
            n_amostras=int(valores.size),
            tolerancia=float(tolerancia),
            valor_min=float(valores.min()),
            valor_max=float(valores.max()),
            pior_margem=float(margens[i]),
            violacoes=violacoes,
            ponto_pior=[float(v) for v in np.asarray(pontos[i], dtype=float).ravel()],
            detalhes=detalhes or {},
        )


class RelatorioResiduos(BaseModel):
    """Resíduos absolutos das identidades de divergência, Laplaciano e Hessiana do levantamento."""
    divergencia: float = Field(..., ge=0.0, description="|div X̃ − (div X − ⟨X̃, H^F⟩)|")
    laplaciano: float = Field(..., ge=0.0, description="|Δ̃F̃ − (ΔF − ⟨grad F̃, H^F⟩)|")
    hessiana_horizontal: float = Field(..., ge=0.0, description="|Hess F̃(X̃,Ỹ) − Hess F(X,Y)|")
    hessiana_vertical: float = Field(..., ge=0.0, description="|Hess F̃(V,W) + ⟨α^F(V,W), grad F̃⟩|")
    hessiana_mista: float = Field(..., ge=0.0, description="|Hess F̃(X̃,V) + ⟨A_X̃ V, grad F̃⟩|")
    discrepancia_sinal_impresso: float = Field(
        default=0.0, ge=0.0,
        description="|Δ̃F̃ − (ΔF + ⟨grad F̃, H^F⟩)|, o sinal como impresso; informativo"
    )

    def maximo(self) -> float:
        return max(self.divergencia, self.laplaciano, self.hessiana_horizontal,
                   self.hessiana_vertical, self.hessiana_mista)


class TermoNorma(BaseModel):
    """Norma amostrada com o ponto que atinge o supremo."""
    sup: float = Field(..., ge=0.0)
    ponto: List[float] = Field(default_factory=list)


class EntradaLimite(BaseModel):
    """Dados geométricos amostrados que alimentam a constante c."""
    k: int = Field(..., ge=2, description="Dimensão da base")
    m: int = Field(..., ge=2, description="Dimensão de M")
    n: int = Field(..., ge=2, description="Dimensão do espaço total")
    a: float = Field(..., gt=0.0, description="Cota superior (curvatura ou w′)")
    b: float = Field(..., gt=0.0, description="Cota inferior (curvatura ou w′)")
    pontos: List[List[float]] = Field(..., description="Pontos amostrados em M (carta de M)")
    norma_H: List[float] = Field(..., description="‖H‖ em cada ponto")
    norma_HF: List[float] = Field(..., description="‖H^F‖ em cada ponto")
    norma_A: List[float] = Field(..., description="‖A‖ em cada ponto")
    norma_alphaF: List[float] = Field(..., description="‖α^F‖ em cada ponto")
    alpha: Optional[float] = Field(default=None, ge=0.0, description="Cota declarada para ‖H‖")

    @model_validator(mode='after')
    def _validar(self):
        if not (self.m <= self.n and self.k <= self.n):
            raise ValueError("dimensões exigem m ≤ n e k ≤ n")
        if self.b > self.a:
            raise ValueError("exige-se b ≤ a")
        tamanhos = {len(self.pontos), len(self.norma_H), len(self.norma_HF),
                    len(self.norma_A), len(self.norma_alphaF)}
        if len(tamanhos) != 1:
            raise ValueError("séries amostradas com tamanhos diferentes")
        for serie in (self.norma_H, self.norma_HF, self.norma_A, self.norma_alphaF):
            if any(v < 0 for v in serie):
                raise ValueError("normas devem ser ≥ 0")
        return self

    def termo(self, nome: str) -> TermoNorma:
        serie = getattr(self, nome)
        if not serie:
            return TermoNorma(sup=0.0)
        i = max(range(len(serie)), key=serie.__getitem__)
        return TermoNorma(sup=serie[i], ponto=self.pontos[i])


class LimiteClassico(BaseModel):
    """Limite da literatura com o registro da hipótese."""
    nome: str
    formula: str
    aplicavel: bool
    valor: Optional[float] = Field(default=None, description="None quando a hipótese falha")
    hipotese: str


class LimitesExemplo(BaseModel):
    """Pisos para c nas duas famílias de exemplos (produto warped, fibras geodésicas)."""
    piso_produto_warped: float
    aplicavel_produto_warped: bool
    limite_produto_warped: Optional[float] = None
    piso_fibras_geodesicas: float
    aplicavel_fibras_geodesicas: bool
    limite_fibras_geodesicas: Optional[float] = None


class PontoCurva(BaseModel):
    r: float
    lambda1: float
    mesh_parameter: float
    error_estimate: float = Field(default=0.0, ge=0.0)


class RelatorioLimite(BaseModel):
    """Decomposição de c, limite c²/4, limites clássicos e veredito."""
    dimensoes: Dict[str, int]
    a: float
    b: float
    termos: Dict[str, TermoNorma]
    c: float = Field(..., description="Forma geral: inf[(k−1)b − ‖H^F‖ − (n−m)(a + 2‖A‖ + ‖α^F‖) − ‖H‖]")
    c_forma_curvatura_um: float = Field(..., description="Mesma expressão com +1 no lugar de +a")
    c_pelos_supremos: float = Field(..., description="Expressão avaliada nos supremos de cada termo")
    ponto_c: List[float] = Field(default_factory=list)
    c_refinado: Optional[float] = None
    concordancia_refinamento: Optional[bool] = None
    limite: Optional[float] = Field(default=None, description="c²/4 quando c > 0")
    aplicavel: bool
    limites_classicos: List[LimiteClassico] = Field(default_factory=list)
    limites_exemplo: Optional[LimitesExemplo] = None
    curva: List[PontoCurva] = Field(default_factory=list)
    arquivo_curva: Optional[str] = None
    lambda1_min: Optional[float] = None
    margem: Optional[float] = None
    veredito: Veredito
    motivo: str = ""
    n_amostras: int = 0
    notas: List[str] = Field(default_factory=list)

    @field_serializer('veredito')
    def _serializar_veredito(self, veredito: Veredito) -> str:
        return veredito.name
