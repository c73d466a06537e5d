"""
Cenários: leitura do arquivo TOML, validação pydantic, compilação das
expressões (sympy → torch/numpy) e montagem dos objetos geométricos.
"""
import hashlib
import math
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Literal, Optional, Sequence, Tuple

import numpy as np
import sympy
import torch
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from sympy.core.function import AppliedUndef
from sympy.parsing.sympy_parser import parse_expr, standard_transformations

from configuracao import CONFIG
from erros import CenarioNaoSuportado, ErroConfiguracao, ErroGeometria
from espacos_modelo import EspacoModelo, ModeloHiperbolico, criar_fibra_warped, criar_hiperbolico, criar_linha_warped
from geometria import DTYPE, FuncaoTorch, carta_esfera, carta_euclidiana, constante_em
from imersao import (
    MapaImersao,
    imersao_fatia,
    imersao_grafico,
    imersao_horosfera,
    imersao_identidade,
    imersao_totalmente_geodesica,
)
from submersao import (
    MapaSubmersao,
    submersao_fibra_warped,
    submersao_hopf,
    submersao_identidade,
    submersao_produto,
)

# ==============================
# EXPRESSÕES
# ==============================

FUNCOES_PERMITIDAS = ('exp', 'log', 'sqrt', 'sin', 'cos', 'tan', 'sinh', 'cosh', 'tanh')


def _torch(funcao):
    def aplicar(v):
        return funcao(v if isinstance(v, torch.Tensor) else torch.tensor(v, dtype=DTYPE))
    return aplicar


MODULO_TORCH = {nome: _torch(getattr(torch, nome)) for nome in FUNCOES_PERMITIDAS}
MODULO_TORCH.update({'pi': math.pi, 'e': math.e, 'E': math.e})


def analisar_expressao(texto: str, variaveis: Sequence[str]) -> sympy.Expr:
    """
    Converte texto em expressão sympy aceitando só as variáveis declaradas,
    literais numéricos, + − * / ** e as funções elementares permitidas.

    Raises:
        ErroConfiguracao: sintaxe inválida, símbolo ou função desconhecidos.
    """
    simbolos = {nome: sympy.Symbol(nome, real=True) for nome in variaveis}
    local = dict(simbolos)
    local.update({nome: getattr(sympy, nome) for nome in FUNCOES_PERMITIDAS})
    local.update({'pi': sympy.pi, 'E': sympy.E})
    globais = {'Integer': sympy.Integer, 'Float': sympy.Float, 'Rational': sympy.Rational,
               'Symbol': sympy.Symbol, 'Function': sympy.Function, '__builtins__': {}}
    try:
        expressao = parse_expr(str(texto), local_dict=local, global_dict=globais,
                               transformations=standard_transformations, evaluate=True)
    except Exception as erro:
        raise ErroConfiguracao(f"expressão inválida '{texto}': {erro}")
    if not isinstance(expressao, sympy.Expr):
        raise ErroConfiguracao(f"'{texto}' não é uma expressão numérica")
    desconhecidos = {str(s) for s in expressao.free_symbols} - set(variaveis)
    if desconhecidos:
        raise ErroConfiguracao(
            f"símbolos desconhecidos em '{texto}': {sorted(desconhecidos)} (permitidos: {list(variaveis)})"
        )
    indefinidas = sorted({str(f.func) for f in expressao.atoms(AppliedUndef)})
    if indefinidas:
        raise ErroConfiguracao(f"funções não permitidas em '{texto}': {indefinidas}")
    return expressao


def compilar_torch(texto: str, variaveis: Sequence[str]) -> FuncaoTorch:
    """x (tensor com len(variaveis) coordenadas) ↦ valor escalar torch."""
    expressao = analisar_expressao(texto, variaveis)
    simbolos = [sympy.Symbol(v, real=True) for v in variaveis]
    funcao = sympy.lambdify(simbolos, expressao, modules=[MODULO_TORCH])

    def avaliar(x):
        coordenadas = [x] if x.ndim == 0 else [x[i] for i in range(len(variaveis))]
        valor = funcao(*coordenadas)
        if not isinstance(valor, torch.Tensor):
            return constante_em(x, float(valor))
        return valor + 0.0 * x.sum()
    return avaliar


def compilar_numpy(texto: str, variavel: str) -> Callable[[np.ndarray], np.ndarray]:
    """Função vetorizada de uma variável (coeficientes radiais S(ρ))."""
    expressao = analisar_expressao(texto, [variavel])
    funcao = sympy.lambdify([sympy.Symbol(variavel, real=True)], expressao, modules='numpy')
    return lambda rho: np.broadcast_to(np.asarray(funcao(np.asarray(rho, dtype=float)), dtype=float),
                                       np.shape(rho)).astype(float)


# ==============================
# MODELOS DO ARQUIVO
# ==============================

class _Secao(BaseModel):
    model_config = ConfigDict(extra='forbid')


class SecaoBase(_Secao):
    tipo: Literal['hiperbolico', 'linha_warped', 'esfera_hopf'] = Field(..., description="Espaço modelo B")
    k: int = Field(default=2, ge=2, description="Dimensão de B")
    a: float = Field(default=1.0, gt=0.0, description="ℍ^k(−a²)")
    w: Optional[str] = Field(default=None, description="w(s) do modelo e^{2w(s)}g + ds²")
    faixa_s: Tuple[float, float] = Field(default=(-3.0, 3.0))
    fibra: Literal['euclidiana', 'esfera'] = Field(default='euclidiana', description="Fibra (N^{k−1}, g)")
    raio_fibra: float = Field(default=1.0, gt=0.0)
    cotas: Optional[Tuple[float, float]] = Field(default=None, description="(a, b) declarados para w′")

    @model_validator(mode='after')
    def _validar(self):
        if self.tipo == 'linha_warped':
            if self.w is None:
                raise ValueError("linha_warped exige a expressão w")
            if self.fibra == 'esfera' and self.k != 3:
                raise ValueError("fibra esfera exige k = 3")
        if self.tipo == 'esfera_hopf' and self.k != 2:
            raise ValueError("esfera_hopf tem k = 2")
        return self


class SecaoTotal(_Secao):
    tipo: Literal['identidade', 'produto', 'produto_warped', 'hopf']
    dim_fibra: int = Field(default=1, ge=1)
    escala_fibra: float = Field(default=1.0, gt=0.0)
    rho: Optional[str] = Field(default=None, description="ρ nas coordenadas da base")
    exigir_hipotese_rho: bool = Field(default=False, description="Exigir ‖grad ρ‖/ρ ≤ 1")

    @model_validator(mode='after')
    def _validar(self):
        if self.tipo == 'produto_warped' and self.rho is None:
            raise ValueError("produto_warped exige a expressão rho")
        return self


class SecaoImersao(_Secao):
    tipo: Literal['identidade', 'fatia', 'horosfera', 'totalmente_geodesica', 'grafico']
    valor_fibra: float = 0.0
    s0: float = 0.0
    m: Optional[int] = Field(default=None, ge=2)
    altura: Optional[str] = None
    alpha: Optional[float] = Field(default=None, ge=0.0, description="Cota declarada de ‖H‖")

    @model_validator(mode='after')
    def _validar(self):
        if self.tipo == 'totalmente_geodesica' and self.m is None:
            raise ValueError("totalmente_geodesica exige m")
        if self.tipo == 'grafico' and self.altura is None:
            raise ValueError("grafico exige a expressão altura")
        return self


class SecaoAmostragem(_Secao):
    semente: int = Field(default=CONFIG.SEMENTE_PADRAO, ge=0)
    verificacao: int = Field(default=CONFIG.AMOSTRAS_VERIFICACAO, ge=1)
    constante_c: int = Field(default=CONFIG.AMOSTRAS_CONSTANTE_C, ge=1)
    fator_refinamento: int = Field(default=CONFIG.FATOR_REFINAMENTO_C, ge=1)


class SecaoEspectral(_Secao):
    metodo: Literal['radial', 'fem'] = 'radial'
    modelo: Literal['hiperbolico', 'euclidiano', 'expressao'] = 'hiperbolico'
    dim: int = Field(default=2, ge=1, description="Dimensão para o método radial")
    a: float = Field(default=1.0, gt=0.0)
    volume: Optional[str] = Field(default=None, description="S(rho) para modelo = expressao")
    raios: List[float] = Field(..., min_length=1)
    grade: int = Field(default=CONFIG.GRADE_RADIAL, ge=CONFIG.GRADE_MINIMA)
    niveis: int = Field(default=CONFIG.NIVEIS_FEM, ge=1)
    centro: Optional[List[float]] = None
    segundo_centro: Optional[List[float]] = None
    tolerancia: Optional[float] = Field(default=None, gt=0.0, description="Erro de Richardson máximo")

    @model_validator(mode='after')
    def _validar(self):
        if any(r <= 0 for r in self.raios):
            raise ValueError("raios devem ser positivos")
        if list(self.raios) != sorted(self.raios):
            raise ValueError("raios devem estar em ordem crescente")
        if self.metodo == 'radial' and self.modelo == 'expressao' and self.volume is None:
            raise ValueError("modelo expressao exige volume")
        return self


class SecaoTolerancias(_Secao):
    identidade: float = Field(default=CONFIG.TOL_IDENTIDADE, gt=0.0)
    piso: float = Field(default=CONFIG.TOL_PISO, gt=0.0)
    concordancia_c: float = Field(default=CONFIG.TOL_CONCORDANCIA_C, gt=0.0)


class Cenario(_Secao):
    """Arquivo de cenário completo."""
    nome: str
    descricao: str = ""
    base: Optional[SecaoBase] = None
    total: Optional[SecaoTotal] = None
    imersao: Optional[SecaoImersao] = None
    amostragem: SecaoAmostragem = Field(default_factory=SecaoAmostragem)
    espectral: Optional[SecaoEspectral] = None
    tolerancias: SecaoTolerancias = Field(default_factory=SecaoTolerancias)

    def dim_base(self) -> Optional[int]:
        return None if self.base is None else self.base.k

    def dim_total(self) -> Optional[int]:
        if self.total is None or self.base is None:
            return None
        if self.total.tipo == 'hopf':
            return 3
        if self.total.tipo == 'identidade':
            return self.base.k
        return self.base.k + self.total.dim_fibra

    def dim_imersao(self) -> Optional[int]:
        n = self.dim_total()
        if self.imersao is None or n is None:
            return None
        return {
            'identidade': n,
            'fatia': self.base.k,
            'horosfera': n - 1,
            'totalmente_geodesica': self.imersao.m,
            'grafico': n - 1,
        }[self.imersao.tipo]

    def nomes_base(self) -> List[str]:
        if self.base.tipo == 'esfera_hopf':
            return ['eta', 'phi']
        if self.base.tipo == 'linha_warped' and self.base.fibra == 'esfera':
            return ['theta', 'phi', 's']
        return [f"x{i}" for i in range(1, self.base.k)] + ['s']

    def nomes_total(self) -> List[str]:
        if self.total.tipo == 'hopf':
            return ['eta', 'xi1', 'xi2']
        if self.total.tipo == 'identidade':
            return self.nomes_base()
        return self.nomes_base() + [f"y{i}" for i in range(1, self.total.dim_fibra + 1)]

    @model_validator(mode='after')
    def _validar(self):
        if self.total is not None and self.base is None:
            raise ValueError("seção total exige seção base")
        if self.imersao is not None and self.total is None:
            raise ValueError("seção imersao exige seção total")
        if self.total is not None:
            hopf_total = self.total.tipo == 'hopf'
            hopf_base = self.base.tipo == 'esfera_hopf'
            if hopf_total != hopf_base:
                raise ValueError("total hopf e base esfera_hopf andam juntos")
        n, k, m = self.dim_total(), self.dim_base(), self.dim_imersao()
        if n is not None and k is not None and k > n:
            raise ValueError(f"dim B = {k} > dim M̃ = {n}")
        if m is not None and not 2 <= m <= n:
            raise ValueError(f"dim M = {m} fora de [2, dim M̃ = {n}]")
        if self.imersao is not None and self.imersao.tipo in ('horosfera', 'totalmente_geodesica'):
            if not (self.base.tipo == 'hiperbolico' and self.total.tipo == 'identidade'):
                raise ValueError(f"{self.imersao.tipo} exige base hiperbolico com total identidade")
        if self.imersao is not None and self.imersao.tipo == 'fatia' and self.total.tipo in ('identidade', 'hopf'):
            raise ValueError("fatia exige um espaço total com fibra")
        if self.base is not None and self.base.w is not None:
            analisar_expressao(self.base.w, ['s'])
        if self.total is not None and self.total.rho is not None:
            analisar_expressao(self.total.rho, self.nomes_base())
        if self.imersao is not None and self.imersao.altura is not None:
            analisar_expressao(self.imersao.altura, self.nomes_total()[:-1])
        if self.espectral is not None and self.espectral.volume is not None:
            analisar_expressao(self.espectral.volume, ['rho'])
        return self


# ==============================
# LEITURA
# ==============================

_POSICAO_TOML = re.compile(r"line (\d+), column (\d+)")


def _mensagem_validacao(erro: ValidationError) -> str:
    partes = []
    for item in erro.errors():
        local = ".".join(str(x) for x in item['loc']) or "cenário"
        partes.append(f"{local}: {item['msg']}")
    return "; ".join(partes)


def carregar_cenario(caminho) -> Tuple[Cenario, str]:
    """
    Lê e valida o cenário; devolve também o sha256 do arquivo.

    Raises:
        ErroConfiguracao: arquivo ausente, TOML malformado (com linha/coluna)
            ou conteúdo inválido.
    """
    caminho = Path(caminho)
    try:
        bruto = caminho.read_bytes()
    except OSError as erro:
        raise ErroConfiguracao(f"não foi possível ler {caminho}: {erro}")
    try:
        dados = tomllib.loads(bruto.decode('utf-8'))
    except UnicodeDecodeError as erro:
        raise ErroConfiguracao(f"{caminho}: arquivo não é UTF-8 ({erro})")
    except tomllib.TOMLDecodeError as erro:
        posicao = _POSICAO_TOML.search(str(erro))
        linha, coluna = (int(posicao.group(1)), int(posicao.group(2))) if posicao else (None, None)
        raise ErroConfiguracao(f"{caminho}: TOML inválido: {erro}", linha, coluna)
    try:
        cenario = Cenario.model_validate(dados)
    except ValidationError as erro:
        raise ErroConfiguracao(f"{caminho}: {_mensagem_validacao(erro)}")
    return cenario, hashlib.sha256(bruto).hexdigest()


# ==============================
# MONTAGEM
# ==============================

@dataclass(frozen=True, eq=False)
class Montagem:
    """Objetos geométricos construídos a partir do cenário."""
    cenario: Cenario
    modelo: Optional[EspacoModelo]
    submersao: Optional[MapaSubmersao]
    imersao: Optional[MapaImersao]


def _montar_modelo(cenario: Cenario) -> Optional[EspacoModelo]:
    base = cenario.base
    if base is None or base.tipo == 'esfera_hopf':
        return None
    if base.tipo == 'hiperbolico':
        return criar_hiperbolico(base.k, base.a)
    if base.fibra == 'esfera':
        fibra = carta_esfera(base.raio_fibra, nome="S2")
    else:
        fibra = carta_euclidiana(base.k - 1, limite=CONFIG.LIMITE_CARTA, nome="R")
    w = compilar_torch(base.w, ['s'])
    return criar_linha_warped(fibra, w, base.faixa_s, base.cotas, nome=f"linha_warped({base.w})")


def _montar_submersao(cenario: Cenario, modelo: Optional[EspacoModelo]) -> Optional[MapaSubmersao]:
    total = cenario.total
    if total is None:
        return None
    if total.tipo == 'hopf':
        return submersao_hopf()
    if total.tipo == 'identidade':
        return submersao_identidade(modelo.metrica)
    if total.tipo == 'produto':
        return submersao_produto(modelo, total.dim_fibra, total.escala_fibra)
    rho = compilar_torch(total.rho, cenario.nomes_base())
    fibra = carta_euclidiana(total.dim_fibra, limite=CONFIG.LIMITE_CARTA, escala=total.escala_fibra, nome="fibra")
    ambiente = criar_fibra_warped(modelo, fibra, rho, total.exigir_hipotese_rho,
                                  cenario.amostragem.verificacao, cenario.amostragem.semente,
                                  nome=f"produto_warped({total.rho})")
    return submersao_fibra_warped(ambiente)


def _montar_imersao(cenario: Cenario, sub: Optional[MapaSubmersao]) -> Optional[MapaImersao]:
    imersao = cenario.imersao
    if imersao is None:
        return None
    alvo = sub.total
    if imersao.tipo == 'identidade':
        return imersao_identidade(alvo)
    if imersao.tipo == 'fatia':
        return imersao_fatia(alvo, sub.k, imersao.valor_fibra)
    if imersao.tipo == 'horosfera':
        return imersao_horosfera(alvo, imersao.s0)
    if imersao.tipo == 'totalmente_geodesica':
        return imersao_totalmente_geodesica(alvo, imersao.m)
    altura = compilar_torch(imersao.altura, cenario.nomes_total()[:-1])
    return imersao_grafico(alvo, altura)


def montar(cenario: Cenario) -> Montagem:
    """
    Raises:
        ErroConfiguracao: a geometria declarada viola alguma hipótese
            (w′ ≤ 0, ρ ≤ 0, cotas erradas, métrica degenerada).
    """
    try:
        modelo = _montar_modelo(cenario)
        sub = _montar_submersao(cenario, modelo)
        return Montagem(cenario, modelo, sub, _montar_imersao(cenario, sub))
    except ErroGeometria as erro:
        raise ErroConfiguracao(f"cenário '{cenario.nome}': {type(erro).__name__}: {erro}") from erro


def exigir(montagem: Montagem, *secoes: str) -> None:
    """
    Raises:
        CenarioNaoSuportado: falta alguma das seções pedidas pelo comando.
    """
    faltando = [s for s in secoes if getattr(montagem, s, None) is None]
    if faltando:
        raise CenarioNaoSuportado(f"cenário '{montagem.cenario.nome}' sem {', '.join(faltando)}")


def e_hiperbolico(modelo: Optional[EspacoModelo]) -> bool:
    return isinstance(modelo, ModeloHiperbolico)
