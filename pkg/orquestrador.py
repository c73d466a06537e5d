"""
Orquestração dos comandos: suíte de verificação, curva λ₁(r), limite c²/4
e gravação dos artefatos (JSON e CSV) no diretório de saída.
"""
import json
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
import torch

from cenario import Cenario, Montagem, compilar_numpy, e_hiperbolico, exigir
from configuracao import CONFIG, MetodoEspectral, Veredito
from erros import CenarioNaoSuportado, NaoMonotona
from espacos_modelo import (
    amostrar_curvatura_seccional,
    criar_hiperbolico,
    verificar_busemann,
    verificar_curvatura_hiperbolica,
    verificar_piso_laplaciano,
    verificar_sanduiche_hessiana,
)
from espectral import (
    EstimativaTom,
    ProblemaRadial,
    ResultadoAutovalor,
    coeficiente_euclidiano,
    coeficiente_hiperbolico,
    curva_fem,
    curva_radial,
    estimar_tom,
)
from geometria import CampoEscalar, MetricaCarta, carta_euclidiana, christoffel, christoffel_fd
from imersao import curvatura_media, residuo_gulliver, rotacao_normal_aleatoria, termos_gulliver
from limites import amostrar_entrada, veredito
from modelos_relatorio import PontoCurva, RelatorioLimite, RelatorioVerificacao
from submersao import (
    campo_base_aleatorio,
    desvio_isometria,
    desvios_tipagem,
    geometria_fibra,
    norma_A_oraculo,
    normas_pontuais,
    residuo_gradiente_levantado,
    residuos_lemas,
    residuos_proposicao,
    rotacao_vertical_aleatoria,
    tensores_oneill,
    vertical_aleatorio,
)

CODIGO_OK = 0
CODIGO_FALHA = 1
CODIGO_CONFIGURACAO = 2


@dataclass
class Parametros:
    """Valores efetivos: cenário sobrescrito pelas opções de linha de comando."""
    semente: int
    amostras_verificacao: int
    amostras_c: int
    fator_refinamento: int
    tolerancia: float
    tolerancia_piso: float
    tolerancia_concordancia: float

    @classmethod
    def de_cenario(cls, cenario: Cenario, semente: Optional[int] = None,
                   tolerancia: Optional[float] = None, amostras: Optional[int] = None) -> 'Parametros':
        amostragem = cenario.amostragem
        return cls(
            semente=amostragem.semente if semente is None else semente,
            amostras_verificacao=amostras or amostragem.verificacao,
            amostras_c=amostras or amostragem.constante_c,
            fator_refinamento=amostragem.fator_refinamento,
            tolerancia=cenario.tolerancias.identidade if tolerancia is None else tolerancia,
            tolerancia_piso=cenario.tolerancias.piso,
            tolerancia_concordancia=cenario.tolerancias.concordancia_c,
        )


# ==============================
# ARTEFATOS
# ==============================

class GerenciadorRelatorios:
    """Grava os artefatos de um cenário; todo arquivo carrega o hash do cenário e a versão."""

    def __init__(self, cenario: Cenario, sha256: str, diretorio: Optional[str] = None):
        self.cenario = cenario
        self.sha256 = sha256
        self.diretorio = diretorio or CONFIG.DIRETORIO_SAIDA
        self.arquivos: List[str] = []

    def _caminho(self, sufixo: str) -> str:
        os.makedirs(self.diretorio, exist_ok=True)
        return os.path.join(self.diretorio, f"{self.cenario.nome}_{sufixo}")

    def cabecalho(self) -> Dict[str, Any]:
        return {'nome': self.cenario.nome, 'sha256': self.sha256, 'versao': CONFIG.VERSAO}

    def salvar_json(self, sufixo: str, dados: Dict[str, Any]) -> str:
        relatorio = {'cenario': self.cabecalho(), **dados}
        caminho = self._caminho(sufixo)
        with open(caminho, 'w', encoding='utf-8') as f:
            json.dump(relatorio, f, indent=2, ensure_ascii=False, sort_keys=True)
            f.write('\n')
        self.arquivos.append(caminho)
        return caminho

    def salvar_curva(self, curva: List[PontoCurva], sufixo: str = "lambda1.csv") -> str:
        """CSV com cabeçalho; a primeira linha é um comentário com hash e versão."""
        tabela = pd.DataFrame([p.model_dump() for p in curva], columns=CONFIG.COLUNAS_CSV)
        caminho = self._caminho(sufixo)
        with open(caminho, 'w', encoding='utf-8', newline='') as f:
            f.write(f"# cenario={self.cenario.nome} sha256={self.sha256} versao={CONFIG.VERSAO}\n")
            tabela.to_csv(f, index=False, float_format=CONFIG.FORMATO_CSV, lineterminator='\n')
        self.arquivos.append(caminho)
        return caminho


def ler_curva(caminho: str) -> List[PontoCurva]:
    tabela = pd.read_csv(caminho, comment='#')
    return [PontoCurva(**linha) for linha in tabela.to_dict(orient='records')]


# ==============================
# VERIFICAÇÃO
# ==============================

def _campo_base(montagem: Montagem) -> CampoEscalar:
    """F da base: a função de Busemann do modelo ou, sem modelo, sin(u₁)cos(u₂)."""
    if montagem.modelo is not None:
        return montagem.modelo.busemann.campo
    return CampoEscalar(montagem.submersao.base, lambda u: torch.sin(u[0]) * torch.cos(u[1]), "sin·cos")


def _de_erros(nome: str, erros, pontos, tolerancia: float, detalhes=None) -> RelatorioVerificacao:
    return RelatorioVerificacao.de_amostras(nome, erros, [-e for e in erros], pontos, tolerancia, detalhes)


def verificar_christoffel(carta: MetricaCarta, n_amostras: int, semente: int) -> RelatorioVerificacao:
    """Γ por diferenciação automática contra diferenças centrais."""
    pontos = carta.amostrar(n_amostras, semente)
    erros = []
    for p in pontos:
        gamma = christoffel(carta, p)
        erros.append(float(np.max(np.abs(gamma - christoffel_fd(carta, p))) / max(1.0, np.max(np.abs(gamma)))))
    return _de_erros(f"christoffel_oraculo:{carta.nome}", erros, pontos, CONFIG.TOL_IDENTIDADE)


def _verificacoes_modelo(montagem: Montagem, par: Parametros) -> List[RelatorioVerificacao]:
    modelo = montagem.modelo
    relatorios = [
        verificar_sanduiche_hessiana(modelo, par.amostras_verificacao, par.semente, par.tolerancia),
        verificar_piso_laplaciano(modelo, par.amostras_verificacao, par.semente),
        verificar_busemann(modelo, par.amostras_verificacao, par.semente),
    ]
    if e_hiperbolico(modelo):
        relatorios.append(verificar_curvatura_hiperbolica(modelo, semente=par.semente, tolerancia=par.tolerancia))
    return relatorios


def _verificacoes_submersao(montagem: Montagem, par: Parametros) -> List[RelatorioVerificacao]:
    sub = montagem.submersao
    tol = par.tolerancia
    campo_F = _campo_base(montagem)
    pontos = sub.total.amostrar(par.amostras_verificacao, par.semente)
    rng = np.random.default_rng(par.semente + 3)
    rotacao = rotacao_vertical_aleatoria(sub, par.semente)

    isometria, lemas, proposicao, gradientes, tipagem, referencial = [], [], [], [], [], []
    maximos: Dict[str, float] = {}
    for i, p in enumerate(pontos):
        X = campo_base_aleatorio(sub.k, par.semente + 2 * i)
        Y = campo_base_aleatorio(sub.k, par.semente + 2 * i + 1)
        if sub.n > sub.k:
            V, W = vertical_aleatorio(sub, p, rng), vertical_aleatorio(sub, p, rng)
        else:
            V, W = np.zeros(sub.n), np.zeros(sub.n)

        isometria.append(desvio_isometria(sub, p))
        residuos = residuos_lemas(sub, campo_F, X, Y, V, W, p)
        lemas.append(residuos.maximo())
        for nome, valor in residuos.model_dump().items():
            maximos[nome] = max(maximos.get(nome, 0.0), valor)
        proposicao.append(max(residuos_proposicao(sub, X, Y, p).values()))
        gradientes.append(residuo_gradiente_levantado(sub, campo_F, p))

        if sub.n > sub.k:
            tipagem.append(max(desvios_tipagem(sub, p).values()))
            fibra = geometria_fibra(sub, p)
            girada = geometria_fibra(sub, p, rotacao)
            referencial.append(max(
                float(np.max(np.abs(fibra.HF.componentes - girada.HF.componentes))),
                abs(fibra.norma_alpha - girada.norma_alpha),
            ))

    relatorios = [
        _de_erros("isometria_horizontal", isometria, pontos, 1e-8),
        _de_erros("residuos_lemas_levantamento", lemas, pontos, tol, maximos),
        _de_erros("proposicao_campos_basicos", proposicao, pontos, tol),
        _de_erros("gradiente_levantado", gradientes, pontos, tol),
    ]
    if tipagem:
        relatorios.append(_de_erros("tipagem_oneill", tipagem, pontos, 1e-8))
        relatorios.append(_de_erros("independencia_referencial_vertical", referencial, pontos, 1e-8))

    tipo = montagem.cenario.total.tipo
    if tipo in ('produto', 'produto_warped'):
        normas = [normas_pontuais(sub, p)['norma_A'] for p in pontos]
        relatorios.append(_de_erros("A_nulo_produto_warped", normas, pontos, 1e-8))
    if tipo == 'hopf':
        relatorios.append(_verificar_hopf(montagem, pontos, par))
    return relatorios


def _verificar_hopf(montagem: Montagem, pontos: np.ndarray, par: Parametros) -> RelatorioVerificacao:
    """‖A_X V‖ = ‖X‖‖V‖ pelo tensor calculado e pelo oráculo de diferenças."""
    sub = montagem.submersao
    rng = np.random.default_rng(par.semente + 4)
    V = np.array([0.0, 1.0, 1.0])
    erros, oraculo = [], []
    for p in pontos:
        X = sub.base_horizontal(p) @ rng.standard_normal(sub.k)
        esperado = sub.total.norma(p, X) * sub.total.norma(p, V)
        calculado = sub.total.norma(p, tensores_oneill(sub, p).avaliar_A(X, V))
        referencia = norma_A_oraculo(sub, p, X, V)
        erros.append(max(abs(calculado - esperado), abs(calculado - referencia)))
        oraculo.append(abs(referencia - esperado))
    return _de_erros("hopf_norma_A", erros, pontos, par.tolerancia,
                     {'desvio_max_oraculo': float(max(oraculo, default=0.0))})


def _verificacoes_imersao(montagem: Montagem, par: Parametros) -> List[RelatorioVerificacao]:
    f, sub = montagem.imersao, montagem.submersao
    campo_F = _campo_base(montagem)
    campo_total = CampoEscalar(sub.total, lambda x: campo_F.funcao(sub.mapa(x)), f"{campo_F.nome}∘π")
    pontos = f.carta_fonte.amostrar(par.amostras_verificacao, par.semente)
    rotacao = rotacao_normal_aleatoria(f, par.semente)

    gulliver, referencial, normas_H = [], [], []
    for p in pontos:
        gulliver.append(residuo_gulliver(f, campo_total, p))
        normas_H.append(curvatura_media(f, p).norma)
        if f.n > f.m:
            t0 = termos_gulliver(f, campo_total, p)['hessiana_normal']
            t1 = termos_gulliver(f, campo_total, p, rotacao)['hessiana_normal']
            referencial.append(abs(t0 - t1) / max(1.0, abs(t0)))

    detalhes = {'norma_H_min': float(min(normas_H, default=0.0)), 'norma_H_max': float(max(normas_H, default=0.0))}
    relatorios = [_de_erros("gulliver", gulliver, pontos, par.tolerancia, detalhes)]
    if referencial:
        relatorios.append(_de_erros("independencia_referencial_normal", referencial, pontos, 1e-10))
    alpha = montagem.cenario.imersao.alpha
    if alpha is not None:
        relatorios.append(RelatorioVerificacao.de_amostras(
            "cota_alpha_curvatura_media", normas_H, [alpha - h for h in normas_H], pontos,
            par.tolerancia, {'alpha': alpha}))
    return relatorios


def executar_verificacoes(montagem: Montagem, par: Parametros) -> List[RelatorioVerificacao]:
    """Todas as verificações aplicáveis às seções presentes no cenário."""
    if montagem.modelo is None and montagem.submersao is None:
        raise CenarioNaoSuportado(f"cenário '{montagem.cenario.nome}' sem geometria para verificar")
    relatorios = []
    if montagem.modelo is not None:
        relatorios.extend(_verificacoes_modelo(montagem, par))
    carta = montagem.submersao.total if montagem.submersao is not None else montagem.modelo.metrica
    relatorios.append(verificar_christoffel(carta, min(par.amostras_verificacao, 20), par.semente))
    if montagem.submersao is not None:
        relatorios.extend(_verificacoes_submersao(montagem, par))
    if montagem.imersao is not None:
        relatorios.extend(_verificacoes_imersao(montagem, par))
    return relatorios


# ==============================
# ESPECTRAL
# ==============================

@dataclass
class ResultadoCurva:
    metodo: MetodoEspectral
    curva: List[PontoCurva]
    resultados: List[ResultadoAutovalor]
    tom: Optional[EstimativaTom] = None
    curva_segundo_centro: Optional[List[PontoCurva]] = None
    notas: List[str] = field(default_factory=list)
    monotona: bool = True

    def como_dict(self) -> Dict[str, Any]:
        return {
            'metodo': self.metodo.name,
            'curva': [p.model_dump() for p in self.curva],
            'autovalores': [
                {
                    'r': p.r,
                    'lambda1_malha_fina': res.lambda1,
                    'extrapolado': res.extrapolado,
                    'lambda2': res.lambda2,
                    'norma_residuo': res.norma_residuo,
                    'autovetor_positivo': res.positivo,
                    'iteracoes': res.iteracoes,
                    'ordem_observada': res.ordem_observada,
                }
                for p, res in zip(self.curva, self.resultados)
            ],
            'curva_segundo_centro': (None if self.curva_segundo_centro is None
                                     else [p.model_dump() for p in self.curva_segundo_centro]),
            'tom': None if self.tom is None else {
                'valor_final': self.tom.valor_final,
                'assintota': self.tom.assintota,
                'metodo_ajuste': self.tom.metodo_ajuste,
                'diferenca_segundo_centro': self.tom.diferenca_segundo_centro,
            },
            'monotona': self.monotona,
            'notas': self.notas,
        }


def _coeficiente_volume(cenario: Cenario):
    esp = cenario.espectral
    if esp.modelo == 'hiperbolico':
        return coeficiente_hiperbolico(esp.dim, esp.a)
    if esp.modelo == 'euclidiano':
        return coeficiente_euclidiano(esp.dim)
    return compilar_numpy(esp.volume, 'rho')


def _metrica_fem(montagem: Montagem) -> MetricaCarta:
    """Superfície onde as bolas são malhadas: M quando m = 2, senão o modelo declarado."""
    f = montagem.imersao
    if f is not None and f.m == 2:
        return f.carta_fonte
    esp = montagem.cenario.espectral
    if esp.modelo == 'hiperbolico':
        return criar_hiperbolico(2, esp.a).metrica
    if esp.modelo == 'euclidiano':
        return carta_euclidiana(2, limite=CONFIG.LIMITE_CARTA)
    raise CenarioNaoSuportado("método fem exige uma superfície (imersão com m = 2 ou modelo explícito)")


def calcular_curva(montagem: Montagem) -> ResultadoCurva:
    """λ₁(r) nos raios do cenário e, com ≥ 3 raios, a estimativa do tom."""
    esp = montagem.cenario.espectral
    if esp is None:
        raise CenarioNaoSuportado(f"cenário '{montagem.cenario.nome}' sem seção espectral")
    metodo = MetodoEspectral[esp.metodo.upper()]
    segunda = None
    if metodo is MetodoEspectral.RADIAL:
        problema = ProblemaRadial(esp.dim, _coeficiente_volume(montagem.cenario), esp.raios[0], esp.grade,
                                  nome=montagem.cenario.nome)
        curva, resultados = curva_radial(problema, esp.raios, esp.tolerancia)
    else:
        metrica = _metrica_fem(montagem)
        centro = np.asarray(esp.centro if esp.centro is not None else metrica.amostragem.mean(axis=1))
        curva, resultados = curva_fem(metrica, centro, esp.raios, esp.niveis, esp.tolerancia)
        if esp.segundo_centro is not None:
            segunda, _ = curva_fem(metrica, np.asarray(esp.segundo_centro), esp.raios, esp.niveis, esp.tolerancia)

    resultado = ResultadoCurva(metodo, curva, resultados, curva_segundo_centro=segunda)
    if len(curva) < 3:
        resultado.notas.append(f"{len(curva)} raio(s): estimativa do tom exige ≥ 3")
        return resultado
    try:
        resultado.tom = estimar_tom(
            [(p.r, p.lambda1) for p in curva],
            [p.error_estimate for p in curva],
            None if segunda is None else [(p.r, p.lambda1) for p in segunda],
        )
    except NaoMonotona as erro:
        resultado.monotona = False
        resultado.notas.append(f"curva não monótona: {erro}")
    return resultado


# ==============================
# LIMITE
# ==============================

def _curvaturas_amostradas(carta: MetricaCarta, par: Parametros) -> np.ndarray:
    return amostrar_curvatura_seccional(carta, CONFIG.PLANOS_CURVATURA, par.semente)[:, 0]


def curvatura_maxima_amostrada(montagem: Montagem, par: Parametros) -> float:
    """Maior curvatura seccional de M em planos sorteados (hipótese de McKean)."""
    return float(np.max(_curvaturas_amostradas(montagem.imersao.carta_fonte, par)))


def curvatura_ambiente_amostrada(montagem: Montagem, par: Parametros) -> Tuple[float, float]:
    """(inf, sup) de K̄ no espaço total (hipóteses de Castillon e Cheung–Leung)."""
    curvaturas = _curvaturas_amostradas(montagem.submersao.total, par)
    return float(np.min(curvaturas)), float(np.max(curvaturas))


def calcular_limite(
    montagem: Montagem,
    par: Parametros,
    curva: List[PontoCurva],
    arquivo_curva: Optional[str] = None,
) -> RelatorioLimite:
    exigir(montagem, 'modelo', 'submersao', 'imersao')
    sub, f, modelo = montagem.submersao, montagem.imersao, montagem.modelo
    alpha = montagem.cenario.imersao.alpha
    entrada = amostrar_entrada(sub, f, modelo, par.amostras_c, par.semente, alpha)
    refinada = None
    if par.fator_refinamento > 1:
        refinada = amostrar_entrada(sub, f, modelo, par.amostras_c * par.fator_refinamento, par.semente, alpha)
    notas = []
    if not curva:
        notas.append("cenário sem seção espectral: nada a comparar com c²/4")
    return veredito(
        entrada, curva, refinada, arquivo_curva,
        curvatura_maxima=curvatura_maxima_amostrada(montagem, par),
        curvatura_ambiente=curvatura_ambiente_amostrada(montagem, par),
        notas=notas,
        tolerancia_concordancia=par.tolerancia_concordancia,
    )


# ==============================
# COMANDOS
# ==============================

def _marcador(passou: bool) -> str:
    return "✓" if passou else "❌"


class Orquestrador:
    """Executa os comandos verify, eigen, bound e report sobre uma montagem."""

    def __init__(self, montagem: Montagem, sha256: str, parametros: Parametros,
                 diretorio: Optional[str] = None):
        self.montagem = montagem
        self.parametros = parametros
        self.gerenciador = GerenciadorRelatorios(montagem.cenario, sha256, diretorio)
        self._curva: Optional[ResultadoCurva] = None
        self._arquivo_curva: Optional[str] = None

    @property
    def nome(self) -> str:
        return self.montagem.cenario.nome

    def verificar(self) -> Tuple[int, List[RelatorioVerificacao]]:
        print(f"[Verificação] Cenário '{self.nome}' "
              f"({self.parametros.amostras_verificacao} amostras, semente {self.parametros.semente})")
        relatorios = executar_verificacoes(self.montagem, self.parametros)
        for r in relatorios:
            print(f"  {_marcador(r.passou)} {r.nome}: máx {r.valor_max:.3e} "
                  f"(tolerância {r.tolerancia:.1e}, {r.violacoes} violação(ões))")
            if CONFIG.VERBOSE and r.detalhes:
                print(f"      {r.detalhes}")
        passou = all(r.passou for r in relatorios)
        self.gerenciador.salvar_json("verificacao.json", {
            'passou': passou,
            'verificacoes': [r.model_dump() for r in relatorios],
        })
        return (CODIGO_OK if passou else CODIGO_FALHA), relatorios

    def _obter_curva(self) -> ResultadoCurva:
        if self._curva is None:
            esp = self.montagem.cenario.espectral
            if esp is not None:
                print(f"[Espectral] Método {esp.metodo}, raios {list(esp.raios)}")
            self._curva = calcular_curva(self.montagem)
            self._arquivo_curva = self.gerenciador.salvar_curva(self._curva.curva)
            self.gerenciador.salvar_json("espectral.json", self._curva.como_dict())
        return self._curva

    def autovalores(self) -> Tuple[int, ResultadoCurva]:
        resultado = self._obter_curva()
        for p in resultado.curva:
            print(f"  r = {p.r:g}: λ₁ = {p.lambda1:.10f} ± {p.error_estimate:.2e}")
        if resultado.tom is not None:
            print(f"  Tom estimado: {resultado.tom.assintota:.6f} ({resultado.tom.metodo_ajuste})")
        for nota in resultado.notas:
            print(f"  ⚠️  {nota}")
        return (CODIGO_OK if resultado.monotona else CODIGO_FALHA), resultado

    def limite(self) -> Tuple[int, RelatorioLimite]:
        curva: List[PontoCurva] = []
        if self.montagem.cenario.espectral is not None:
            curva = self._obter_curva().curva
        print(f"[Limite] Amostrando c em {self.parametros.amostras_c} pontos "
              f"(refinamento ×{self.parametros.fator_refinamento})")
        relatorio = calcular_limite(self.montagem, self.parametros, curva,
                                    None if self._arquivo_curva is None else os.path.basename(self._arquivo_curva))
        self.gerenciador.salvar_json("limite.json", relatorio.model_dump())
        print(f"  c = {relatorio.c:.8g} (refinado: {relatorio.c_refinado})")
        if CONFIG.VERBOSE:
            for nome, termo in relatorio.termos.items():
                print(f"      sup {nome} = {termo.sup:.6g} em {termo.ponto}")
        if relatorio.limite is not None:
            print(f"  Limite c²/4 = {relatorio.limite:.8g}")
        for classico in relatorio.limites_classicos:
            valor = f"{classico.valor:.6g}" if classico.aplicavel else "inaplicável"
            print(f"  {classico.nome}: {valor}")
        if relatorio.veredito is Veredito.NAO_APLICAVEL:
            print(f"  ⚠️  {relatorio.motivo}")
        else:
            print(f"  {_marcador(relatorio.veredito is Veredito.PASSOU)} {relatorio.veredito.name}: {relatorio.motivo}")
        codigo = CODIGO_FALHA if relatorio.veredito is Veredito.FALHOU else CODIGO_OK
        return codigo, relatorio

    def relatorio(self) -> int:
        """verify + eigen + bound; 0 sse a verificação passa e o veredito é PASSOU ou não aplicável."""
        codigo_verificacao, verificacoes = self.verificar()
        codigo_espectral = CODIGO_OK
        if self.montagem.cenario.espectral is not None:
            codigo_espectral, _ = self.autovalores()
        codigo_limite, limite = self.limite()
        codigo = max(codigo_verificacao, codigo_espectral, codigo_limite)
        self.gerenciador.salvar_json("relatorio.json", {
            'verificacao_passou': codigo_verificacao == CODIGO_OK,
            'curva_monotona': codigo_espectral == CODIGO_OK,
            'veredito': limite.veredito.name,
            'codigo_saida': codigo,
            'arquivos': sorted(os.path.basename(a) for a in self.gerenciador.arquivos),
        })
        return codigo
