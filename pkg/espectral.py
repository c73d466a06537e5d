"""
Autovalores de Dirichlet λ₁(B(p; r)) de bolas geodésicas.

Dois caminhos independentes:
- radial: −(1/S)(Sφ′)′ = λφ em (0, r), φ′(0) = 0, φ(r) = 0, por volumes
  finitos; o problema tridiagonal simetrizado é resolvido por bissecção na
  sequência de Sturm (LAPACK stebz via eigh_tridiagonal);
- elementos finitos P1 numa malha polar da bola com a métrica da carta
  amostrada nos baricentros; iteração inversa com fatoração LU esparsa.

O tom fundamental λ₁(M) = lim λ₁(r) é estimado a partir da curva completa.
"""
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import curve_fit
from scipy.sparse.linalg import splu

from configuracao import CONFIG
from erros import (
    FronteiraDominio,
    FuncaoNula,
    GradeGrossa,
    MetricaNaoPositivaDefinida,
    MontagemSingular,
    NaoConvergencia,
    NaoMonotona,
    PontosInsuficientes,
)
from geometria import MetricaCarta, christoffel_lote, fator_ortonormal
from modelos_relatorio import PontoCurva

CoeficienteVolume = Callable[[np.ndarray], np.ndarray]

# Nós de Gauss–Legendre para a massa de cada célula radial
_NOS_GAUSS, _PESOS_GAUSS = np.polynomial.legendre.leggauss(4)


# ==============================
# TIPOS
# ==============================

@dataclass(frozen=True, eq=False)
class ResultadoAutovalor:
    """
    Primeiro autopar discreto.

    Attributes:
        lambda1: Menor autovalor da discretização mais fina.
        autovetor: Valores nodais (positivos) nas incógnitas.
        norma_residuo: ‖Kφ − λMφ‖ / (λ‖Mφ‖).
        parametro_malha: Espaçamento radial geodésico.
        lambda2: Segundo autovalor (checagem de simplicidade).
        extrapolado: Valor de Richardson, quando houver refinamento.
        estimativa_erro: |λ_fina − λ_grossa| / 3.
    """
    lambda1: float
    autovetor: np.ndarray
    norma_residuo: float
    parametro_malha: float
    lambda2: Optional[float] = None
    extrapolado: Optional[float] = None
    estimativa_erro: float = 0.0
    iteracoes: int = 0
    ordem_observada: Optional[float] = None

    @property
    def positivo(self) -> bool:
        """Autovetor sem troca de sinal."""
        v = self.autovetor
        return bool(np.all(v > -1e-12 * np.max(np.abs(v))))

    @property
    def valor_relatado(self) -> float:
        return self.lambda1 if self.extrapolado is None else self.extrapolado


@dataclass(frozen=True, eq=False)
class ProblemaRadial:
    """
    Problema de Sturm–Liouville radial de uma variedade rotacionalmente simétrica.

    Attributes:
        dim: Dimensão m da variedade.
        coeficiente_volume: S(ρ), fator de área das esferas geodésicas (vetorizado).
        raio: Raio r da bola.
        n_grade: Número N de nós interiores; há N+1 incógnitas ρ_i = ih, i = 0..N.
    """
    dim: int
    coeficiente_volume: CoeficienteVolume
    raio: float
    n_grade: int = CONFIG.GRADE_RADIAL
    nome: str = "radial"

    def __post_init__(self):
        if self.n_grade < CONFIG.GRADE_MINIMA:
            raise ValueError(f"n_grade = {self.n_grade} < {CONFIG.GRADE_MINIMA}")
        if not self.raio > 0:
            raise ValueError(f"raio = {self.raio} deve ser positivo")

    @property
    def passo(self) -> float:
        return self.raio / (self.n_grade + 1)

    @property
    def nos(self) -> np.ndarray:
        return np.arange(self.n_grade + 1) * self.passo

    def com_grade(self, n_grade: int) -> 'ProblemaRadial':
        return replace(self, n_grade=n_grade)

    def com_raio(self, raio: float) -> 'ProblemaRadial':
        return replace(self, raio=raio)

    def _coeficientes(self) -> Tuple[np.ndarray, np.ndarray]:
        """(S nas faces ρ_{i+½}, massa das células)."""
        h = self.passo
        rho = self.nos
        faces = (np.arange(self.n_grade + 1) + 0.5) * h
        S_faces = np.asarray(self.coeficiente_volume(faces), dtype=float)
        esquerda = np.maximum(rho - 0.5 * h, 0.0)
        direita = rho + 0.5 * h
        meia = 0.5 * (direita - esquerda)
        quadratura = meia[:, None] * _NOS_GAUSS[None, :] + (esquerda + meia)[:, None]
        S_quad = np.asarray(self.coeficiente_volume(quadratura.ravel()), dtype=float).reshape(quadratura.shape)
        massa = meia * (S_quad @ _PESOS_GAUSS)
        if np.any(~np.isfinite(S_faces)) or np.any(S_faces <= 0) or np.any(massa <= 0):
            raise MontagemSingular(f"{self.nome}: S(ρ) não positivo em (0, {self.raio}]")
        return S_faces, massa

    def tridiagonal(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Diagonal e subdiagonal de K e a massa diagonal M."""
        S_faces, massa = self._coeficientes()
        h = self.passo
        diag = S_faces.copy()
        diag[1:] += S_faces[:-1]
        return diag / h, -S_faces[:-1] / h, massa

    def matrizes(self) -> Tuple[sp.csr_matrix, sp.csr_matrix]:
        diag, fora, massa = self.tridiagonal()
        K = sp.diags([fora, diag, fora], [-1, 0, 1], format='csr')
        return K, sp.diags(massa, format='csr')


@dataclass(frozen=True, eq=False)
class DominioTriangulado:
    """
    Triangulação conforme de uma bola na carta 2D.

    Attributes:
        vertices: (V, 2) pontos da carta.
        triangulos: (T, 3) índices, todos com orientação positiva.
        fronteira: (V,) marcador de Dirichlet.
        metrica: Carta cuja métrica define rigidez e massa.
        parametro_malha: Espaçamento radial geodésico.
        metrica_vertices: (V, 2, 2) componentes da métrica nos vértices.
    """
    vertices: np.ndarray
    triangulos: np.ndarray
    fronteira: np.ndarray
    metrica: MetricaCarta
    parametro_malha: float
    metrica_vertices: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.metrica.dim != 2:
            raise MontagemSingular("elementos P1 exigem carta de dimensão 2")
        if self.metrica_vertices is None:
            object.__setattr__(self, 'metrica_vertices', self.metrica.componentes_lote(self.vertices))
        try:
            np.linalg.cholesky(self.metrica_vertices)
        except np.linalg.LinAlgError:
            raise MetricaNaoPositivaDefinida("métrica não positiva definida em algum vértice")
        if np.any(self.areas_carta() <= 0):
            raise MontagemSingular("triângulo degenerado ou com orientação negativa")
        if not np.any(~self.fronteira):
            raise MontagemSingular("domínio sem vértices interiores")

    @property
    def interiores(self) -> np.ndarray:
        return np.flatnonzero(~self.fronteira)

    def areas_carta(self) -> np.ndarray:
        x = self.vertices[self.triangulos]
        e1 = x[:, 1] - x[:, 0]
        e2 = x[:, 2] - x[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def baricentros(self) -> np.ndarray:
        return self.vertices[self.triangulos].mean(axis=1)

    def matrizes(self) -> Tuple[sp.csr_matrix, sp.csr_matrix]:
        """
        Rigidez e massa globais restritas aos vértices interiores.

        K_e = √det g · |T| · ∇φᵀ g⁻¹ ∇φ e M_e = √det g · |T|/12 · (1 + δ),
        com g no baricentro.
        """
        x = self.vertices[self.triangulos]
        arestas = np.stack([x[:, 1] - x[:, 0], x[:, 2] - x[:, 0]], axis=2)  # (T, 2, 2) em colunas
        areas = self.areas_carta()
        referencia = np.array([[-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])
        gradientes = np.einsum('tji,jk->tik', np.linalg.inv(arestas), referencia)  # (T, 2, 3)
        g = self.metrica.componentes_lote(self.baricentros())
        peso = np.sqrt(np.linalg.det(g)) * areas
        if np.any(~np.isfinite(peso)) or np.any(peso <= 0):
            raise MontagemSingular("elemento de área não positivo")
        K_local = peso[:, None, None] * np.einsum('tia,tij,tjb->tab', gradientes, np.linalg.inv(g), gradientes)
        M_local = (peso / 12.0)[:, None, None] * (np.ones((3, 3)) + np.eye(3))[None]

        linhas = np.repeat(self.triangulos, 3, axis=1).ravel()
        colunas = np.tile(self.triangulos, (1, 3)).ravel()
        n = self.vertices.shape[0]
        K = sp.coo_matrix((K_local.ravel(), (linhas, colunas)), shape=(n, n)).tocsr()
        M = sp.coo_matrix((M_local.ravel(), (linhas, colunas)), shape=(n, n)).tocsr()
        I = self.interiores
        return K[I][:, I], M[I][:, I]


@dataclass(frozen=True, eq=False)
class EstimativaTom:
    """Estimativa do tom fundamental a partir da curva λ₁(r)."""
    valor_final: float
    assintota: Optional[float]
    monotona: bool
    metodo_ajuste: str
    pontos: List[Tuple[float, float]]
    diferenca_segundo_centro: Optional[float] = None
    nota: str = ""


# ==============================
# RADIAL
# ==============================

def coeficiente_hiperbolico(m: int, a: float = 1.0) -> CoeficienteVolume:
    """S(ρ) = (sinh(aρ)/a)^{m−1}, esferas geodésicas de ℍ^m(−a²)."""
    return lambda rho: (np.sinh(a * np.asarray(rho)) / a) ** (m - 1)


def coeficiente_euclidiano(m: int) -> CoeficienteVolume:
    if m == 1:
        return lambda rho: np.ones_like(np.asarray(rho, dtype=float))
    return lambda rho: np.asarray(rho, dtype=float) ** (m - 1)


def _autopares_radiais(problema: ProblemaRadial) -> Tuple[float, float, np.ndarray]:
    diag, fora, massa = problema.tridiagonal()
    escala = 1.0 / np.sqrt(massa)
    d = diag * escala ** 2
    e = fora * escala[:-1] * escala[1:]
    valores, vetores = eigh_tridiagonal(d, e, select='i', select_range=(0, 1))
    phi = escala * vetores[:, 0]
    if phi.sum() < 0:
        phi = -phi
    return float(valores[0]), float(valores[1]), phi


def _residuo_relativo(K, M, phi: np.ndarray, lam: float) -> float:
    Mphi = M @ phi
    return float(np.linalg.norm(K @ phi - lam * Mphi) / max(abs(lam) * np.linalg.norm(Mphi), 1e-300))


def lambda1_radial(problema: ProblemaRadial, tolerancia: Optional[float] = None) -> ResultadoAutovalor:
    """
    λ₁ da bola radial com extrapolação de Richardson (grades N e 2N+1).

    Raises:
        GradeGrossa: a estimativa de erro excede `tolerancia`.
    """
    fino = problema.com_grade(2 * problema.n_grade + 1)
    lam_grosso, _, _ = _autopares_radiais(problema)
    lam, lam2, phi = _autopares_radiais(fino)
    erro = abs(lam - lam_grosso) / 3.0
    if tolerancia is not None and erro > tolerancia:
        raise GradeGrossa(erro, tolerancia)
    K, M = fino.matrizes()
    return ResultadoAutovalor(
        lambda1=lam,
        autovetor=phi,
        norma_residuo=_residuo_relativo(K, M, phi, lam),
        parametro_malha=fino.passo,
        lambda2=lam2,
        extrapolado=lam + (lam - lam_grosso) / 3.0,
        estimativa_erro=erro,
    )


def curva_radial(
    problema: ProblemaRadial,
    raios: Sequence[float],
    tolerancia: Optional[float] = None,
) -> Tuple[List[PontoCurva], List[ResultadoAutovalor]]:
    pontos, resultados = [], []
    for r in raios:
        resultado = lambda1_radial(problema.com_raio(float(r)), tolerancia)
        resultados.append(resultado)
        pontos.append(PontoCurva(r=float(r), lambda1=resultado.valor_relatado,
                                 mesh_parameter=resultado.parametro_malha,
                                 error_estimate=resultado.estimativa_erro))
    return pontos, resultados


# ==============================
# MALHAS
# ==============================

def _raios_geodesicos(metrica: MetricaCarta, centro: np.ndarray, raio: float,
                      n_aneis: int, n_raios: int) -> np.ndarray:
    """Pontos exp_p(t_i θ_j), t_i = i·r/n_aneis, integrando todas as geodésicas juntas."""
    E = fator_ortonormal(metrica.componentes(centro))
    theta = 2.0 * np.pi * np.arange(n_raios) / n_raios
    velocidades = (E @ np.stack([np.cos(theta), np.sin(theta)])).T  # (n_raios, 2)
    estado0 = np.concatenate([np.tile(centro, (n_raios, 1)), velocidades], axis=1).ravel()

    def campo(_t, y):
        y = y.reshape(n_raios, 4)
        x, v = y[:, :2], y[:, 2:]
        gamma = christoffel_lote(metrica, x)
        return np.concatenate([v, -np.einsum('rkij,ri,rj->rk', gamma, v, v)], axis=1).ravel()

    tempos = np.linspace(0.0, raio, n_aneis + 1)
    solucao = solve_ivp(campo, (0.0, raio), estado0, method='DOP853', t_eval=tempos, rtol=1e-10, atol=1e-12)
    if not solucao.success:
        raise FronteiraDominio(f"integração das geodésicas falhou: {solucao.message}")
    pontos = solucao.y.T.reshape(n_aneis + 1, n_raios, 4)[:, :, :2]
    if not all(metrica.contem(q) for q in pontos[-1]):
        raise FronteiraDominio(f"bola de raio {raio} sai da carta {metrica.nome}")
    return pontos


def _orientar(vertices: np.ndarray, triangulos: np.ndarray) -> np.ndarray:
    x = vertices[triangulos]
    e1 = x[:, 1] - x[:, 0]
    e2 = x[:, 2] - x[:, 0]
    negativos = (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]) < 0
    triangulos = triangulos.copy()
    triangulos[negativos] = triangulos[negativos][:, [0, 2, 1]]
    return triangulos


def malha_bola_geodesica(
    metrica: MetricaCarta,
    centro,
    raio: float,
    n_aneis: Optional[int] = None,
    n_raios: Optional[int] = None,
) -> DominioTriangulado:
    """
    Malha polar de B(centro; raio): anéis em raio geodésico constante,
    vértices colocados pela aplicação exponencial.
    """
    n_aneis = n_aneis or CONFIG.ANEIS_FEM
    n_raios = n_raios or CONFIG.RAIOS_FEM
    centro = np.asarray(centro, dtype=float)
    metrica.verificar_interior(centro)
    aneis = _raios_geodesicos(metrica, centro, raio, n_aneis, n_raios)[1:]
    vertices = np.vstack([centro[None, :], aneis.reshape(-1, 2)])

    def indice(anel, j):  # anel 1..n_aneis
        return 1 + (anel - 1) * n_raios + (j % n_raios)

    triangulos = [[0, indice(1, j), indice(1, j + 1)] for j in range(n_raios)]
    for anel in range(1, n_aneis):
        for j in range(n_raios):
            a, b = indice(anel, j), indice(anel, j + 1)
            c, d = indice(anel + 1, j), indice(anel + 1, j + 1)
            triangulos += [[a, c, d], [a, d, b]]
    fronteira = np.zeros(vertices.shape[0], dtype=bool)
    fronteira[indice(n_aneis, 0):] = True
    triangulos = _orientar(vertices, np.array(triangulos, dtype=int))
    return DominioTriangulado(vertices, triangulos, fronteira, metrica, raio / n_aneis)


def malha_retangulo(
    metrica: MetricaCarta,
    limites_x: Tuple[float, float],
    limites_y: Tuple[float, float],
    nx: int,
    ny: int,
) -> DominioTriangulado:
    """Grade uniforme de um retângulo da carta, cada quadrado cortado em dois."""
    xs = np.linspace(limites_x[0], limites_x[1], nx + 1)
    ys = np.linspace(limites_y[0], limites_y[1], ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing='ij')
    vertices = np.stack([X.ravel(), Y.ravel()], axis=1)
    indice = lambda i, j: i * (ny + 1) + j
    triangulos = []
    for i in range(nx):
        for j in range(ny):
            a, b = indice(i, j), indice(i + 1, j)
            c, d = indice(i + 1, j + 1), indice(i, j + 1)
            triangulos += [[a, b, c], [a, c, d]]
    fronteira = ((X == xs[0]) | (X == xs[-1]) | (Y == ys[0]) | (Y == ys[-1])).ravel()
    h = max((xs[-1] - xs[0]) / nx, (ys[-1] - ys[0]) / ny)
    return DominioTriangulado(vertices, _orientar(vertices, np.array(triangulos, dtype=int)),
                              fronteira, metrica, h)


# ==============================
# ELEMENTOS FINITOS
# ==============================

def _fatorar(K):
    try:
        return splu(K.tocsc())
    except RuntimeError as erro:
        raise MontagemSingular(f"fatoração da rigidez falhou: {erro}")


def _iteracao_inversa(
    K, M, lu,
    deflacao: Optional[np.ndarray] = None,
    criterio_quociente: bool = False,
) -> Tuple[float, np.ndarray, float, int]:
    """Iteração inversa com deslocamento 0; `deflacao` é M-ortogonalizada a cada passo."""
    x = np.ones(K.shape[0])
    lam_anterior = np.inf
    for iteracao in range(1, CONFIG.MAX_ITERACOES_INVERSA + 1):
        if deflacao is not None:
            x = x - (deflacao @ (M @ x)) * deflacao
        x = x / np.sqrt(x @ (M @ x))
        y = lu.solve(M @ x)
        if deflacao is not None:
            y = y - (deflacao @ (M @ y)) * deflacao
        My = M @ y
        lam = float(y @ (K @ y)) / float(y @ My)
        y = y / np.sqrt(y @ My)
        residuo = _residuo_relativo(K, M, y, lam)
        estagnou = abs(lam - lam_anterior) <= CONFIG.TOL_RESIDUO_INVERSA * abs(lam)
        if residuo < CONFIG.TOL_RESIDUO_INVERSA or (criterio_quociente and estagnou):
            return lam, y, residuo, iteracao
        lam_anterior = lam
        x = y
    raise NaoConvergencia(f"iteração inversa sem convergência em {CONFIG.MAX_ITERACOES_INVERSA} passos")


def lambda1_fem(dominio: DominioTriangulado) -> ResultadoAutovalor:
    """Menor autovalor generalizado Kφ = λMφ nos vértices interiores."""
    K, M = dominio.matrizes()
    lam, phi, residuo, iteracoes = _iteracao_inversa(K, M, _fatorar(K))
    if phi.sum() < 0:
        phi = -phi
    return ResultadoAutovalor(lam, phi, residuo, dominio.parametro_malha, iteracoes=iteracoes)


def segundo_autovalor(dominio: DominioTriangulado, primeiro: ResultadoAutovalor) -> float:
    """λ₂ por iteração inversa deflacionada contra a primeira autofunção."""
    K, M = dominio.matrizes()
    phi = primeiro.autovetor / np.sqrt(primeiro.autovetor @ (M @ primeiro.autovetor))
    lam2, _, _, _ = _iteracao_inversa(K, M, _fatorar(K), deflacao=phi, criterio_quociente=True)
    return lam2


def extrapolar_richardson(valores: Sequence[float]) -> Tuple[float, float, Optional[float]]:
    """
    (extrapolado, estimativa de erro, ordem observada) para valores em
    malhas com h dividido por 2 a cada nível, supondo ordem 2.
    """
    valores = [float(v) for v in valores]
    if len(valores) < 2:
        return valores[-1], 0.0, None
    fino, grosso = valores[-1], valores[-2]
    ordem = None
    if len(valores) >= 3:
        d1, d2 = valores[-3] - grosso, grosso - fino
        if d1 * d2 > 0:
            ordem = float(np.log2(d1 / d2))
    return fino + (fino - grosso) / 3.0, abs(fino - grosso) / 3.0, ordem


def lambda1_bola_fem(
    metrica: MetricaCarta,
    centro,
    raio: float,
    niveis: Optional[int] = None,
    tolerancia: Optional[float] = None,
) -> ResultadoAutovalor:
    """λ₁ de B(centro; raio) em malhas polares sucessivamente duplicadas."""
    niveis = niveis or CONFIG.NIVEIS_FEM
    valores, resultado, dominio = [], None, None
    for nivel in range(niveis):
        dominio = malha_bola_geodesica(metrica, centro, raio,
                                       CONFIG.ANEIS_FEM * 2 ** nivel, CONFIG.RAIOS_FEM * 2 ** nivel)
        resultado = lambda1_fem(dominio)
        valores.append(resultado.lambda1)
        if CONFIG.VERBOSE:
            print(f"[FEM] r={raio:g} nível {nivel}: λ₁={resultado.lambda1:.10f} "
                  f"({resultado.iteracoes} iterações)")
    extrapolado, erro, ordem = extrapolar_richardson(valores)
    if tolerancia is not None and erro > tolerancia:
        raise GradeGrossa(erro, tolerancia)
    return replace(resultado, lambda2=segundo_autovalor(dominio, resultado),
                   extrapolado=extrapolado, estimativa_erro=erro, ordem_observada=ordem)


def curva_fem(
    metrica: MetricaCarta,
    centro,
    raios: Sequence[float],
    niveis: Optional[int] = None,
    tolerancia: Optional[float] = None,
) -> Tuple[List[PontoCurva], List[ResultadoAutovalor]]:
    pontos, resultados = [], []
    for r in raios:
        resultado = lambda1_bola_fem(metrica, centro, float(r), niveis, tolerancia)
        resultados.append(resultado)
        pontos.append(PontoCurva(r=float(r), lambda1=resultado.valor_relatado,
                                 mesh_parameter=resultado.parametro_malha,
                                 error_estimate=resultado.estimativa_erro))
    return pontos, resultados


# ==============================
# QUOCIENTE DE RAYLEIGH E TOM
# ==============================

def quociente_rayleigh(dominio: Union[DominioTriangulado, ProblemaRadial], valores) -> float:
    """
    φᵀKφ / φᵀMφ. Para malhas aceita os valores em todos os vértices
    (os de fronteira devem ser nulos) ou só nos interiores.

    Raises:
        FuncaoNula: φ identicamente nula.
    """
    phi = np.asarray(valores, dtype=float)
    if isinstance(dominio, DominioTriangulado) and phi.size == dominio.vertices.shape[0]:
        bordo = phi[dominio.fronteira]
        if np.any(np.abs(bordo) > 1e-12 * max(1.0, np.max(np.abs(phi)))):
            raise ValueError("φ deve se anular na fronteira de Dirichlet")
        phi = phi[dominio.interiores]
    K, M = dominio.matrizes()
    if phi.size != K.shape[0]:
        raise ValueError(f"φ com {phi.size} valores; esperado {K.shape[0]}")
    massa = float(phi @ (M @ phi))
    if not np.any(phi) or massa <= 0:
        raise FuncaoNula("φ identicamente nula")
    return float(phi @ (K @ phi)) / massa


def _assintota(r, L, C, beta):
    return L + C / (r + beta) ** 2


def estimar_tom(
    curva: Sequence[Tuple[float, float]],
    erros: Optional[Sequence[float]] = None,
    curva_segundo_centro: Optional[Sequence[Tuple[float, float]]] = None,
) -> EstimativaTom:
    """
    Checa a monotonia λ₁(r₁) ≥ λ₁(r₂) e ajusta L + C/(r+β)² aos três
    últimos pontos (ou L + C/r² se o ajuste não convergir).

    Raises:
        PontosInsuficientes: menos de três pontos ou raios fora de ordem.
        NaoMonotona: λ₁ cresce com r além da tolerância.
    """
    pontos = [(float(r), float(lam)) for r, lam in curva]
    if len(pontos) < 3:
        raise PontosInsuficientes(f"{len(pontos)} ponto(s); o ajuste exige ≥ 3")
    r = np.array([p[0] for p in pontos])
    lam = np.array([p[1] for p in pontos])
    if np.any(np.diff(r) <= 0):
        raise PontosInsuficientes("raios devem ser estritamente crescentes")
    erros = np.zeros_like(lam) if erros is None else np.asarray(erros, dtype=float)
    folga = CONFIG.TOL_MONOTONIA + erros[:-1] + erros[1:]
    subidas = np.flatnonzero(lam[1:] - lam[:-1] > folga)
    if subidas.size:
        i = int(subidas[0])
        raise NaoMonotona(f"λ₁({r[i + 1]:g}) = {lam[i + 1]:.8g} > λ₁({r[i]:g}) = {lam[i]:.8g}")

    r3, lam3 = r[-3:], lam[-3:]
    metodo = "L + C/(r+β)²"
    try:
        chute = (lam3[-1], max(lam3[0] - lam3[-1], 1e-12) * r3[0] ** 2, 0.0)
        limites = ([-np.inf, 0.0, -0.9 * r3[0]], [np.inf, np.inf, 10.0 * r3[-1]])
        parametros, _ = curve_fit(_assintota, r3, lam3, p0=chute, bounds=limites, method='trf', maxfev=20000)
        assintota = float(parametros[0])
        if not np.isfinite(assintota):
            raise RuntimeError("assíntota não finita")
    except (RuntimeError, ValueError):
        metodo = "L + C/r²"
        A = np.stack([np.ones_like(r3), 1.0 / r3 ** 2], axis=1)
        assintota = float(np.linalg.lstsq(A, lam3, rcond=None)[0][0])

    diferenca = None
    if curva_segundo_centro:
        outro = dict((float(a), float(b)) for a, b in curva_segundo_centro)
        comuns = [x for x in r if x in outro]
        if comuns:
            diferenca = float(max(abs(outro[x] - lam[list(r).index(x)]) for x in comuns))
    return EstimativaTom(float(lam[-1]), assintota, True, metodo, pontos, diferenca)
