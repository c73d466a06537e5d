"""
Submersões Riemannianas π: M̃ → B.

O projetor horizontal P_H(x) = G⁻¹Dᵀ(DG⁻¹Dᵀ)⁻¹D é escrito em torch, então
as extensões locais x ↦ P_V(x)w (verticais) e x ↦ P_H(x)w (horizontais) são
campos suaves cujas derivadas covariantes saem de uma única chamada a jacfwd.
Daí vêm α^F, H^F e os tensores de O'Neill T e A.
"""
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
import torch
from scipy.linalg import null_space
from scipy.stats import ortho_group
from torch.func import jacfwd

from configuracao import CONFIG
from erros import DimensaoInvalida, FibraDegenerada
from espacos_modelo import AmbienteFibraWarped, EspacoModelo, criar_fibra_warped
from geometria import (
    DTYPE,
    CampoEscalar,
    FuncaoTorch,
    MetricaCarta,
    VetorTangente,
    carta_euclidiana,
    christoffel,
    christoffel_fd,
    colchete,
    constante_em,
    derivada_covariante,
    diagonal,
    divergencia,
    gradiente,
    gram_schmidt,
    hessiana,
    laplaciano,
    norma_bilinear,
    para_numpy,
    para_tensor,
)
from modelos_relatorio import RelatorioResiduos


@dataclass(frozen=True, eq=False)
class MapaSubmersao:
    nome: str
    total: MetricaCarta
    base: MetricaCarta
    mapa: FuncaoTorch

    @property
    def n(self) -> int:
        return self.total.dim

    @property
    def k(self) -> int:
        return self.base.dim

    def projecao(self, p) -> np.ndarray:
        return para_numpy(self.mapa(para_tensor(p)))

    def diferencial(self, p) -> np.ndarray:
        return para_numpy(jacfwd(self.mapa)(para_tensor(p)))

    def base_vertical(self, p) -> np.ndarray:
        """Colunas G-ortonormais gerando ker dπ(p)."""
        D = self._diferencial_sobrejetora(p)
        return gram_schmidt(self.total.componentes(p), null_space(D))

    def base_horizontal(self, p) -> np.ndarray:
        D = self._diferencial_sobrejetora(p)
        G = self.total.componentes(p)
        return gram_schmidt(G, np.linalg.solve(G, D.T))

    def _diferencial_sobrejetora(self, p) -> np.ndarray:
        D = self.diferencial(p)
        if np.linalg.matrix_rank(D, tol=1e-10 * max(1.0, np.abs(D).max())) != self.k:
            raise FibraDegenerada(f"{self.nome}: posto vertical ≠ {self.n - self.k} em {p}")
        return D


def projetor_horizontal_t(sub: MapaSubmersao, x: torch.Tensor) -> torch.Tensor:
    G = sub.total.funcao_metrica(x)
    D = jacfwd(sub.mapa)(x)
    levantamento = torch.linalg.solve(G, D.T)
    return levantamento @ torch.linalg.solve(D @ levantamento, D)


def campo_basico(sub: MapaSubmersao, campo_base: FuncaoTorch) -> FuncaoTorch:
    """Levantamento horizontal de um campo da base como campo em M̃."""
    def campo(x):
        G = sub.total.funcao_metrica(x)
        D = jacfwd(sub.mapa)(x)
        levantamento = torch.linalg.solve(G, D.T)
        return levantamento @ torch.linalg.solve(D @ levantamento, campo_base(sub.mapa(x)))
    return campo


@dataclass(frozen=True, eq=False)
class EstadoLocal:
    """Dados de primeira ordem de π em p, reutilizados por α^F, T e A."""
    ponto: np.ndarray
    G: np.ndarray
    gamma: np.ndarray
    PH: np.ndarray
    dPH: np.ndarray  # [i, j, l] = ∂_l (P_H)_ij
    horizontal: np.ndarray
    vertical: np.ndarray

    @property
    def PV(self) -> np.ndarray:
        return np.eye(self.G.shape[0]) - self.PH

    @property
    def referencial(self) -> np.ndarray:
        return np.hstack([self.horizontal, self.vertical])

    def nabla_extensao(self, u, w, vertical: bool) -> np.ndarray:
        """∇_u do campo x ↦ P(x)w, com P = P_V ou P_H."""
        u = np.asarray(u, dtype=float)
        w = np.asarray(w, dtype=float)
        P = self.PV if vertical else self.PH
        dP = -self.dPH if vertical else self.dPH
        return np.einsum('ijl,l,j->i', dP, u, w) + np.einsum('kij,i,j->k', self.gamma, u, P @ w)

    def componentes(self, vetor: np.ndarray, base: np.ndarray) -> np.ndarray:
        """Coordenadas de `vetor` na base G-ortonormal `base`."""
        return base.T @ self.G @ vetor


def estado_local(sub: MapaSubmersao, p, rotacao_vertical: Optional[np.ndarray] = None) -> EstadoLocal:
    p = np.asarray(p, dtype=float)
    sub.total.verificar_interior(p)
    G = sub.total.componentes(p)
    horizontal = sub.base_horizontal(p)
    vertical = sub.base_vertical(p)
    if vertical.shape[1] != sub.n - sub.k:
        raise FibraDegenerada(f"{sub.nome}: posto vertical {vertical.shape[1]} ≠ {sub.n - sub.k}")
    if rotacao_vertical is not None and vertical.shape[1] > 0:
        vertical = vertical @ rotacao_vertical
    x = para_tensor(p)
    projetor = lambda y: projetor_horizontal_t(sub, y)
    return EstadoLocal(
        ponto=p,
        G=G,
        gamma=christoffel(sub.total, p),
        PH=para_numpy(projetor(x)),
        dPH=para_numpy(jacfwd(projetor)(x)),
        horizontal=horizontal,
        vertical=vertical,
    )


# ==============================
# OPERAÇÕES
# ==============================

def decompor(sub: MapaSubmersao, p, v) -> Tuple[VetorTangente, VetorTangente]:
    """(v^V, v^H) com v = v^V + v^H."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    PH = para_numpy(projetor_horizontal_t(sub, para_tensor(p)))
    horizontal = PH @ v
    return VetorTangente(p, v - horizontal), VetorTangente(p, horizontal)


def levantamento_horizontal(sub: MapaSubmersao, p, X_base) -> VetorTangente:
    """X̃ horizontal com dπ(X̃) = X."""
    p = np.asarray(p, dtype=float)
    G = sub.total.componentes(p)
    D = sub._diferencial_sobrejetora(p)
    levantamento = np.linalg.solve(G, D.T)
    return VetorTangente(p, levantamento @ np.linalg.solve(D @ levantamento, np.asarray(X_base, dtype=float)))


def desvio_isometria(sub: MapaSubmersao, p) -> float:
    """max |(dπ E_H)ᵀ g_B (dπ E_H) − I| para um referencial horizontal ortonormal E_H."""
    E = sub.base_horizontal(p)
    imagem = sub.diferencial(p) @ E
    gB = sub.base.componentes(sub.projecao(p))
    return float(np.max(np.abs(imagem.T @ gB @ imagem - np.eye(sub.k))))


@dataclass(frozen=True, eq=False)
class GeometriaFibra:
    ponto: np.ndarray
    alpha: np.ndarray              # (nv, nv, n) vetores horizontais em coordenadas
    alpha_componentes: np.ndarray  # (nv, nv, k) no referencial horizontal ortonormal
    HF: VetorTangente
    norma_alpha: float
    norma_HF: float


def _geometria_fibra(estado: EstadoLocal) -> GeometriaFibra:
    Ev = estado.vertical
    nv = Ev.shape[1]
    n = estado.G.shape[0]
    alpha = np.zeros((nv, nv, n))
    for i in range(nv):
        for j in range(nv):
            alpha[i, j] = estado.PH @ estado.nabla_extensao(Ev[:, i], Ev[:, j], vertical=True)
    alpha = 0.5 * (alpha + np.swapaxes(alpha, 0, 1))
    componentes = np.einsum('hk,ijk->ijh', estado.horizontal.T @ estado.G, alpha)
    HF = np.einsum('iik->k', alpha) if nv else np.zeros(n)
    norma_HF = float(np.sqrt(max(HF @ estado.G @ HF, 0.0)))
    return GeometriaFibra(estado.ponto, alpha, componentes, VetorTangente(estado.ponto, HF),
                          norma_bilinear(componentes), norma_HF)


def geometria_fibra(sub: MapaSubmersao, p, rotacao_vertical: Optional[np.ndarray] = None) -> GeometriaFibra:
    """α^F(v,w) = (∇̃_v W)^H e H^F = Σ α^F(e_i, e_i)."""
    return _geometria_fibra(estado_local(sub, p, rotacao_vertical))


@dataclass(frozen=True, eq=False)
class TensoresONeill:
    ponto: np.ndarray
    T: np.ndarray  # [a, b] = T_{E_a} E_b em coordenadas, E = (horizontal | vertical)
    A: np.ndarray
    T_componentes: np.ndarray
    A_componentes: np.ndarray
    referencial: np.ndarray
    norma_T: float
    norma_A: float

    def avaliar_A(self, u, v) -> np.ndarray:
        """A_u v para u, v em coordenadas (por bilinearidade no referencial)."""
        cu = self._coeficientes(u)
        cv = self._coeficientes(v)
        return np.einsum('a,b,abk->k', cu, cv, self.A)

    def avaliar_T(self, u, v) -> np.ndarray:
        return np.einsum('a,b,abk->k', self._coeficientes(u), self._coeficientes(v), self.T)

    def _coeficientes(self, v) -> np.ndarray:
        return np.linalg.solve(self.referencial, np.asarray(v, dtype=float))


def _tensores_oneill(estado: EstadoLocal) -> TensoresONeill:
    E = estado.referencial
    n = E.shape[0]
    PH, PV = estado.PH, estado.PV
    T = np.zeros((n, n, n))
    A = np.zeros((n, n, n))
    for a in range(n):
        ev, eh = PV @ E[:, a], PH @ E[:, a]
        for b in range(n):
            w = E[:, b]
            T[a, b] = (PH @ estado.nabla_extensao(ev, w, vertical=True)
                       + PV @ estado.nabla_extensao(ev, w, vertical=False))
            A[a, b] = (PV @ estado.nabla_extensao(eh, w, vertical=False)
                       + PH @ estado.nabla_extensao(eh, w, vertical=True))
    T_comp = np.einsum('hk,abk->abh', E.T @ estado.G, T)
    A_comp = np.einsum('hk,abk->abh', E.T @ estado.G, A)
    return TensoresONeill(estado.ponto, T, A, T_comp, A_comp, E,
                          norma_bilinear(T_comp), norma_bilinear(A_comp))


def tensores_oneill(sub: MapaSubmersao, p, rotacao_vertical: Optional[np.ndarray] = None) -> TensoresONeill:
    """T_E F = (∇_{E^V} F^V)^H + (∇_{E^V} F^H)^V;  A_E F = (∇_{E^H} F^H)^V + (∇_{E^H} F^V)^H."""
    return _tensores_oneill(estado_local(sub, p, rotacao_vertical))


def normas_pontuais(sub: MapaSubmersao, p) -> Dict[str, float]:
    """‖H^F‖, ‖α^F‖, ‖A‖ e ‖T‖ num ponto, com um único estado local."""
    if sub.n == sub.k:
        return {'norma_HF': 0.0, 'norma_alphaF': 0.0, 'norma_A': 0.0, 'norma_T': 0.0}
    estado = estado_local(sub, p)
    fibra = _geometria_fibra(estado)
    tensores = _tensores_oneill(estado)
    return {
        'norma_HF': fibra.norma_HF,
        'norma_alphaF': fibra.norma_alpha,
        'norma_A': tensores.norma_A,
        'norma_T': tensores.norma_T,
    }


def desvios_tipagem(sub: MapaSubmersao, p) -> Dict[str, float]:
    """A antissimétrico e bem tipado no par horizontal; T = α^F nos pares verticais."""
    estado = estado_local(sub, p)
    tensores = _tensores_oneill(estado)
    fibra = _geometria_fibra(estado)
    k = estado.horizontal.shape[1]
    A_hh = tensores.A[:k, :k]
    A_hv = tensores.A[:k, k:]
    return {
        'antissimetria_A': float(np.max(np.abs(A_hh + np.swapaxes(A_hh, 0, 1)), initial=0.0)),
        'A_horizontal_vertical': float(np.max(np.abs(np.einsum('ij,abj->abi', estado.PH, A_hh)), initial=0.0)),
        'A_misto_horizontal': float(np.max(np.abs(np.einsum('ij,abj->abi', estado.PV, A_hv)), initial=0.0)),
        'T_igual_alphaF': float(np.max(np.abs(tensores.T[k:, k:] - fibra.alpha), initial=0.0)),
    }


# ==============================
# IDENTIDADES DO LEVANTAMENTO
# ==============================

def _composicao(sub: MapaSubmersao, campo_base: CampoEscalar) -> CampoEscalar:
    return CampoEscalar(sub.total, lambda x: campo_base.funcao(sub.mapa(x)), f"{campo_base.nome}∘π")


def residuos_lemas(
    sub: MapaSubmersao,
    campo_base: CampoEscalar,
    campo_X: FuncaoTorch,
    campo_Y: FuncaoTorch,
    V,
    W,
    p,
    rotacao_vertical: Optional[np.ndarray] = None,
) -> RelatorioResiduos:
    """
    Resíduos das identidades para F̃ = F∘π, X̃, Ỹ básicos e V, W verticais.

    A identidade do Laplaciano usa o sinal obtido traçando Hess F̃(V,W) =
    −⟨α^F(V,W), grad F̃⟩ sobre um referencial vertical:
    Δ̃F̃ = ΔF − ⟨grad F̃, H^F⟩. O desvio do sinal oposto vai como informação.
    """
    p = np.asarray(p, dtype=float)
    pb = sub.projecao(p)
    estado = estado_local(sub, p, rotacao_vertical)
    fibra = _geometria_fibra(estado)
    tensores = _tensores_oneill(estado)
    HF = fibra.HF.componentes

    X_til = campo_basico(sub, campo_X)
    Y_til = campo_basico(sub, campo_Y)
    x = para_tensor(p)
    Xp = para_numpy(X_til(x))
    Yp = para_numpy(Y_til(x))
    Xb = para_numpy(campo_X(para_tensor(pb)))
    Yb = para_numpy(campo_Y(para_tensor(pb)))
    V = estado.PV @ np.asarray(V, dtype=float)
    W = estado.PV @ np.asarray(W, dtype=float)

    campo_total = _composicao(sub, campo_base)
    dF = campo_total.diferencial(p)
    hess_total = hessiana(campo_total, p)

    div_total = divergencia(sub.total, p, X_til)
    div_base = divergencia(sub.base, pb, campo_X)
    lap_total = laplaciano(campo_total, p)
    lap_base = laplaciano(campo_base, pb)
    correcao = float(dF @ HF)

    alpha_VW = estado.PH @ estado.nabla_extensao(V, W, vertical=True)
    A_XV = tensores.avaliar_A(Xp, V)

    return RelatorioResiduos(
        divergencia=abs(div_total - (div_base - float(Xp @ estado.G @ HF))),
        laplaciano=abs(lap_total - (lap_base - correcao)),
        hessiana_horizontal=abs(hess_total.avaliar(Xp, Yp) - hessiana(campo_base, pb).avaliar(Xb, Yb)),
        hessiana_vertical=abs(hess_total.avaliar(V, W) + float(dF @ alpha_VW)),
        hessiana_mista=abs(hess_total.avaliar(Xp, V) + float(dF @ A_XV)),
        discrepancia_sinal_impresso=abs(lap_total - (lap_base + correcao)),
    )


def residuos_proposicao(
    sub: MapaSubmersao,
    campo_X: FuncaoTorch,
    campo_Y: FuncaoTorch,
    p,
) -> Dict[str, float]:
    """
    Fatos básicos sobre campos básicos X̃, Ỹ:
      (a) ⟨X̃,Ỹ⟩ = ⟨X,Y⟩∘π;
      (b) [X̃,Ỹ]^H = levantamento de [X,Y];
      (c) (∇̃_X̃ Ỹ)^H = levantamento de ∇_X Y;
      (d) ∇̃_X̃ Ỹ = levantamento de ∇_X Y + ½[X̃,Ỹ]^V.
    """
    p = np.asarray(p, dtype=float)
    pb = sub.projecao(p)
    X_til = campo_basico(sub, campo_X)
    Y_til = campo_basico(sub, campo_Y)
    x = para_tensor(p)
    Xp = para_numpy(X_til(x))
    Yp = para_numpy(Y_til(x))
    Xb = para_numpy(campo_X(para_tensor(pb)))
    Yb = para_numpy(campo_Y(para_tensor(pb)))
    G = sub.total.componentes(p)
    PH = para_numpy(projetor_horizontal_t(sub, x))
    PV = np.eye(sub.n) - PH

    def levantar(v):
        return levantamento_horizontal(sub, p, v).componentes

    nabla_total = derivada_covariante(sub.total, p, Y_til, Xp)
    nabla_base = levantar(derivada_covariante(sub.base, pb, campo_Y, Xb))
    colchete_total = colchete(X_til, Y_til, p)
    colchete_base = levantar(colchete(campo_X, campo_Y, pb))
    return {
        'a_produto_interno': abs(float(Xp @ G @ Yp) - sub.base.produto_interno(pb, Xb, Yb)),
        'b_colchete_horizontal': float(np.max(np.abs(PH @ colchete_total - colchete_base))),
        'c_conexao_horizontal': float(np.max(np.abs(PH @ nabla_total - nabla_base))),
        'd_conexao_basica': float(np.max(np.abs(nabla_total - nabla_base - 0.5 * PV @ colchete_total))),
    }


def residuo_conexao_basica(sub: MapaSubmersao, campo_X: FuncaoTorch, campo_Y: FuncaoTorch, p) -> float:
    """|∇̃_X̃ Ỹ − levantamento(∇_X Y) − ½[X̃,Ỹ]^V|."""
    return residuos_proposicao(sub, campo_X, campo_Y, p)['d_conexao_basica']


def residuo_gradiente_levantado(sub: MapaSubmersao, campo_base: CampoEscalar, p) -> float:
    """grad(F∘π) = levantamento de grad F."""
    p = np.asarray(p, dtype=float)
    pb = sub.projecao(p)
    grad_total = gradiente(_composicao(sub, campo_base), p).componentes
    grad_base = gradiente(campo_base, pb).componentes
    return float(np.max(np.abs(grad_total - levantamento_horizontal(sub, p, grad_base).componentes)))


def campo_base_aleatorio(dim: int, semente: int) -> FuncaoTorch:
    """Campo suave X(u) = c + 0.2·B·sin(u) com coeficientes sorteados."""
    rng = np.random.default_rng(semente)
    c = torch.tensor(rng.standard_normal(dim), dtype=DTYPE)
    B = torch.tensor(rng.standard_normal((dim, dim)), dtype=DTYPE)
    return lambda u: c + 0.2 * B @ torch.sin(u)


def vertical_aleatorio(sub: MapaSubmersao, p, rng: np.random.Generator) -> np.ndarray:
    Ev = sub.base_vertical(p)
    return Ev @ rng.standard_normal(Ev.shape[1])


def rotacao_vertical_aleatoria(sub: MapaSubmersao, semente: int) -> Optional[np.ndarray]:
    nv = sub.n - sub.k
    if nv == 0:
        return None
    if nv == 1:
        return -np.ones((1, 1))
    return ortho_group.rvs(nv, random_state=semente)


# ==============================
# SUBMERSÕES PRONTAS
# ==============================

def submersao_identidade(carta: MetricaCarta) -> MapaSubmersao:
    """id: M̃ → M̃ (n = k); todas as grandezas das fibras se anulam."""
    return MapaSubmersao("identidade", carta, carta, lambda x: x)


def submersao_fibra_warped(ambiente: AmbienteFibraWarped) -> MapaSubmersao:
    k = ambiente.base.metrica.dim
    return MapaSubmersao(ambiente.metrica.nome, ambiente.metrica, ambiente.base.metrica, lambda x: x[:k])


def submersao_produto(base: EspacoModelo, dim_fibra: int, escala_fibra: float = 1.0) -> MapaSubmersao:
    """B × ℝ^{dim_fibra} → B, com a fibra escalada por escala_fibra."""
    if dim_fibra < 1:
        raise DimensaoInvalida("produto exige fibra de dimensão ≥ 1")
    fibra = carta_euclidiana(dim_fibra, limite=CONFIG.LIMITE_CARTA, escala=escala_fibra, nome="fibra")
    ambiente = criar_fibra_warped(base, fibra, lambda x: constante_em(x, 1.0), nome="produto")
    return submersao_fibra_warped(ambiente)


def submersao_hopf() -> MapaSubmersao:
    """
    S³(1) → S²(1/2) nas coordenadas de Hopf (η, ξ₁, ξ₂):
    métrica dη² + cos²η dξ₁² + sin²η dξ₂², π = (η, ξ₁ − ξ₂),
    base dη² + sin²η cos²η dφ².
    """
    borda = 0.02
    limites_eta = [borda, np.pi / 2 - borda]
    amostragem_eta = [0.25, np.pi / 2 - 0.25]

    def metrica_total(x):
        return diagonal([constante_em(x, 1.0), torch.cos(x[0]) ** 2, torch.sin(x[0]) ** 2])

    def metrica_base(y):
        return diagonal([constante_em(y, 1.0), (torch.sin(y[0]) * torch.cos(y[0])) ** 2])

    total = MetricaCarta(3, metrica_total,
                         np.array([limites_eta, [-np.pi, np.pi], [-np.pi, np.pi]]),
                         np.array([amostragem_eta, [-2.0, 2.0], [-2.0, 2.0]]), "S3")
    base = MetricaCarta(2, metrica_base,
                        np.array([limites_eta, [-2 * np.pi - 1.0, 2 * np.pi + 1.0]]),
                        np.array([amostragem_eta, [-2.0, 2.0]]), "S2(1/2)")
    return MapaSubmersao("hopf", total, base, lambda x: torch.stack([x[0], x[1] - x[2]]))


def norma_A_oraculo(sub: MapaSubmersao, p, X, V) -> float:
    """
    ‖(∇̃_X V)^H‖ por diferenças centrais, estendendo V com coeficientes
    constantes (campo de Killing das fibras de Hopf).
    """
    p = np.asarray(p, dtype=float)
    gamma = christoffel_fd(sub.total, p)
    nabla = np.einsum('kij,i,j->k', gamma, np.asarray(X, dtype=float), np.asarray(V, dtype=float))
    _, horizontal = decompor(sub, p, nabla)
    return horizontal.norma(sub.total)
