"""
Ponto de entrada do verificador de limites inferiores para o tom fundamental
de subvariedades de espaços com submersões Riemannianas.
"""
import argparse
import sys
import time
import traceback
from datetime import datetime
from typing import List, Optional

from cenario import carregar_cenario, montar
from configuracao import CONFIG
from erros import CenarioNaoSuportado, ErroConfiguracao, ErroEspectral, ErroGeometria
from orquestrador import CODIGO_CONFIGURACAO, CODIGO_FALHA, CODIGO_OK, Orquestrador, Parametros

COMANDOS = ('verify', 'eigen', 'bound', 'report')


def parse_arguments(argv: Optional[List[str]] = None):
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        description="Verificador de limites inferiores para o tom fundamental λ₁(M)",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Exemplos de uso:
  # Identidades de Hessiana, Laplaciano e tensores de O'Neill
  python main.py verify cenarios/produto_h2_r.toml

  # Curva λ₁(r) de bolas geodésicas (CSV + JSON)
  python main.py eigen cenarios/curva_h2.toml

  # Constante c, limite c²/4 e limites clássicos
  python main.py bound cenarios/h4_r_fatia.toml --samples 200

  # Tudo junto, com saída em outro diretório
  python main.py report cenarios/cheung_leung_h2_h3.toml --out resultados --seed 7

Códigos de saída: 0 sucesso (ou limite não aplicável), 1 verificação falhou ou erro no cálculo, 2 erro de configuração.
        """
    )
    parser.add_argument('comando', choices=COMANDOS,
                        help='verify | eigen | bound | report')
    parser.add_argument('cenario', type=str, metavar='CENARIO',
                        help='Arquivo TOML do cenário')
    parser.add_argument('--out', '-o', type=str, metavar='DIR', default=CONFIG.DIRETORIO_SAIDA,
                        help=f'Diretório dos artefatos (padrão: {CONFIG.DIRETORIO_SAIDA})')
    parser.add_argument('--seed', type=int, metavar='SEMENTE',
                        help='Semente da amostragem (sobrescreve o cenário)')
    parser.add_argument('--tol', type=float, metavar='TOL',
                        help='Tolerância das identidades (sobrescreve o cenário)')
    parser.add_argument('--samples', type=int, metavar='N',
                        help='Número de amostras para verificações e para c (sobrescreve o cenário)')
    parser.add_argument('--verbose', '-v', action='store_true',
                        help='Mostra informações detalhadas durante a execução')
    args = parser.parse_args(argv)
    if args.seed is not None and args.seed < 0:
        parser.error("--seed deve ser ≥ 0")
    if args.tol is not None and args.tol <= 0:
        parser.error("--tol deve ser positivo")
    if args.samples is not None and args.samples < 1:
        parser.error("--samples deve ser ≥ 1")
    return args


def exibir_introducao(comando: str, caminho: str, sha256: str):
    print("=" * 60)
    print("VERIFICADOR DO TOM FUNDAMENTAL")
    print("=" * 60)
    print(f"Comando: {comando}")
    print(f"Cenário: {caminho}")
    print(f"SHA-256: {sha256}")
    print(f"Versão:  {CONFIG.VERSAO}")
    print("=" * 60)


def executar(args) -> int:
    cenario, sha256 = carregar_cenario(args.cenario)
    exibir_introducao(args.comando, args.cenario, sha256)
    montagem = montar(cenario)
    parametros = Parametros.de_cenario(cenario, args.seed, args.tol, args.samples)
    orquestrador = Orquestrador(montagem, sha256, parametros, args.out)

    if args.comando == 'verify':
        codigo, _ = orquestrador.verificar()
    elif args.comando == 'eigen':
        codigo, _ = orquestrador.autovalores()
    elif args.comando == 'bound':
        codigo, _ = orquestrador.limite()
    else:
        codigo = orquestrador.relatorio()

    print("\nArtefatos:")
    for caminho in orquestrador.gerenciador.arquivos:
        print(f"  • {caminho}")
    return codigo


def main(argv: Optional[List[str]] = None) -> int:
    """Função principal do programa; devolve o código de saída."""
    inicio = time.time()
    print(f"\n{'=' * 60}")
    print(f"INÍCIO: {datetime.now().strftime('%H:%M:%S.%f')[:-3]}")
    print(f"{'=' * 60}\n")

    args = parse_arguments(argv)
    CONFIG.VERBOSE = args.verbose

    try:
        codigo = executar(args)
    except (ErroConfiguracao, CenarioNaoSuportado) as erro:
        print(f"\n❌ {type(erro).__name__}: {erro}")
        codigo = CODIGO_CONFIGURACAO
    except ErroGeometria as erro:
        # falha geométrica durante o cálculo; hipóteses violadas já saem em montar()
        print(f"\n❌ {type(erro).__name__}: {erro}")
        codigo = CODIGO_FALHA
    except ErroEspectral as erro:
        print(f"\n❌ {type(erro).__name__}: {erro}")
        codigo = CODIGO_FALHA
    except KeyboardInterrupt:
        print("\n\nExecução interrompida pelo usuário.")
        codigo = CODIGO_FALHA
    except Exception as erro:
        print(f"\nErro durante a execução: {erro}")
        traceback.print_exc()
        codigo = CODIGO_FALHA

    duracao = time.time() - inicio
    marcador = "✓" if codigo == CODIGO_OK else "✗"
    print(f"\n{'=' * 60}")
    print(f"{marcador} Código de saída: {codigo}")
    print(f"DURAÇÃO TOTAL: {duracao:.3f}s")
    print(f"{'=' * 60}\n")
    return codigo


if __name__ == "__main__":
    sys.exit(main())
