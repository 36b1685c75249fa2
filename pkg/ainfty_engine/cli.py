"""
Command-line driver.

Every command prints line records ``KIND key=value ...`` and returns 0 when
the report is clean, 1 when it has findings and 2 on errors.
"""

import argparse
import logging
import os
import shlex
import sys
from typing import Callable, Dict, List, Optional, Tuple

import jaraco.logging

from . import __version__
from .backend.ainfty import CurvedAInfAlgebra, check_relations, check_unit, deform, default_max_arity
from .backend.bar import bar_page, d_squared, kappa_identity_defect
from .backend.errors import EngineError, SemanticError
from .backend.homology import FiniteComplex, cohomology, is_zero
from .backend.limits import direct_limit, filtration_system, stagewise_quasi_isomorphisms
from .backend.mc import solve_bounding_cochain, verify_cyclic
from .backend.modcat import (AInfBimodule, AInfModule, bimodule_to_functor, check_bimodule_relations,
                             check_module_relations, is_dga_isomorphism, is_representable_on_object,
                             lambda_chain_map, lambda_is_quasi_iso, tensor_dg, tensor_swap, yoneda_left)
from .backend.store import EngineStore, digest
from .backend.textformat import StructureDocument, dump, load, parse_expression
from .backend.trees import (ASSOCIAHEDRON, MULTIPLIHEDRON, StratumDescriptor, boundary_map, enumerate_strata,
                            parse_shape)

logger = logging.getLogger("CLI")

DEFAULT_TRUNCATION = 4

Report = Tuple[int, List[str]]


def _quote(text: str) -> str:
    return '"' + text.replace('"', "'") + '"'


def resolve_bound(flag: Optional[int], env_var: str, store: Optional[EngineStore], key: str,
                  default: Optional[int]) -> Optional[int]:
    """Flag, then environment, then settings store, then the built-in default."""
    if flag is not None:
        return flag
    value = os.environ.get(env_var)
    if value:
        try:
            return int(value)
        except ValueError:
            logger.warning(f"Ignoring non-integer {env_var}={value!r}")
    if store is not None:
        value = store.get_setting(key)
        if value:
            try:
                return int(value)
            except ValueError:
                logger.warning(f"Ignoring non-integer setting {key}={value!r}")
    return default


def _load_algebra(path: str) -> CurvedAInfAlgebra:
    document = load(path)
    if document.kind != "algebra":
        raise SemanticError(f"{path} holds a {document.kind}, expected an algebra")
    return document.structure


def _load_over(path: str, *algebras: CurvedAInfAlgebra) -> StructureDocument:
    return load(path, {A.name: A for A in algebras})


def _object(text: Optional[str]) -> Optional[str]:
    return None if text in (None, "", "-") else text


def cmd_check(args, store) -> Report:
    A = _load_algebra(args.algebra)
    lines = []
    if args.module or args.bimodule:
        document = _load_over(args.module or args.bimodule, A, *[_load_algebra(p) for p in args.right or []])
        structure = document.structure
        bound = resolve_bound(args.max_arity, "AINFTY_MAX_ARITY", store, "max_arity",
                              default_max_arity(structure.kmax))
        if isinstance(structure, AInfModule):
            report = check_module_relations(structure, bound)
        elif isinstance(structure, AInfBimodule):
            report = check_bimodule_relations(structure, bound)
        else:
            raise SemanticError(f"{document.name} is a {document.kind}, expected a module or bimodule")
        name = document.name
        order = structure.basis.order
    else:
        bound = resolve_bound(args.max_arity, "AINFTY_MAX_ARITY", store, "max_arity", default_max_arity(A.kmax))
        report = check_relations(A, bound)
        name = A.name
        order = A.basis.order
    for residual in report.curved_consistent:
        lines.append(f"CURVED {residual.line(order)}")
    for residual in report.residuals:
        lines.append(f"RESIDUAL {residual.line(order)}")
    if report.passing_variant is not None:
        lines.append(f"VARIANT rule={report.passing_variant.value}")
    if not args.module and not args.bimodule and A.units and not check_unit(A):
        lines.append(f"RESIDUAL kind=unit name={A.name}")
    findings = [line for line in lines if not line.startswith("CURVED")]
    if not findings:
        lines.append(f"OK kind=relations name={name} max_arity={bound}")
    return (1 if findings else 0), lines


def cmd_deform(args, store) -> Report:
    A = _load_algebra(args.algebra)
    b = parse_expression(args.b, A.basis)
    deformed = deform(A, b, args.max_insertions)
    lines = [f"CURVATURE name={deformed.name} value={_quote(A.basis.format_element(deformed.curvature))}"]
    if args.output:
        dump(args.output, deformed)
        lines.append(f"OK kind=deform output={args.output}")
    bound = resolve_bound(args.max_arity, "AINFTY_MAX_ARITY", store, "max_arity", default_max_arity(deformed.kmax))
    report = check_relations(deformed, bound)
    lines += [f"RESIDUAL {r.line(A.basis.order)}" for r in report.residuals]
    return (1 if report else 0), lines


def cmd_solve_bc(args, store) -> Report:
    C = _load_algebra(args.algebra)
    document = _load_over(args.module, C)
    D = document.structure
    if not isinstance(D, AInfModule):
        raise SemanticError(f"{args.module} holds a {document.kind}, expected a module")
    if args.cyclic:
        u = parse_expression(args.cyclic, D.basis)
    elif document.cyclic is not None:
        u = document.cyclic
    else:
        raise SemanticError(f"{args.module} names no cyclic element; pass --cyclic")
    cert = verify_cyclic(C, D, u)
    b = solve_bounding_cochain(C, D, cert)
    return 0, [f"b = {C.basis.format_element(b)}"]


def cmd_cohomology(args, store) -> Report:
    document = load(args.file) if not args.algebra else _load_over(args.file, _load_algebra(args.algebra))
    structure = document.structure
    if isinstance(structure, FiniteComplex):
        complexes = {None: structure}
    elif isinstance(structure, CurvedAInfAlgebra):
        if not structure.is_flat():
            raise EngineError(f"{structure.name} is curved; m1 is not a differential")
        complexes = {None: FiniteComplex.from_operation(structure.basis, structure.op(1), structure.name)}
    elif isinstance(structure, AInfModule):
        complexes = {Z: structure.complex_at(Z) for Z in structure.algebra.objects()}
    else:
        raise SemanticError(f"cohomology of a {document.kind} is not supported")
    lines = []
    for Z, complex_ in complexes.items():
        where = "" if Z is None else f" object={Z}"
        for line in cohomology(complex_).lines():
            lines.append(f"DEGREE{where} {line}")
    return 0, lines


def cmd_yoneda(args, store) -> Report:
    A = _load_algebra(args.algebra)
    length = resolve_bound(args.length, "AINFTY_TRUNCATION", store, "truncation", DEFAULT_TRUNCATION)
    Y = _object(args.object)
    M = _load_over(args.module, A).structure if args.module else yoneda_left(A, Y)
    lines = []
    chain_map = lambda_chain_map(M, Y, length)
    defects = chain_map.chain_defects()
    for s in sorted(defects):
        lines.append(f"RESIDUAL kind=lambda degree={s}")
    quasi = not defects and lambda_is_quasi_iso(M, Y, length)
    if not defects and not quasi:
        lines.append(f"RESIDUAL kind=quasi_iso object={Y}")
    page = bar_page(A, M, Y, length)
    for s in page.internal_degrees():
        for r in range(1, length + 1):
            if not is_zero(kappa_identity_defect(page, r, s)):
                lines.append(f"RESIDUAL kind=kappa r={r} s={s}")
            if r < length and not is_zero(d_squared(page, r, s)):
                lines.append(f"RESIDUAL kind=d_squared r={r} s={s}")
    if lines:
        return 1, lines
    return 0, [f"OK kind=yoneda object={Y} length={length} chain_map=true quasi_iso=true"]


def cmd_representable(args, store) -> Report:
    length = resolve_bound(args.length, "AINFTY_TRUNCATION", store, "truncation", DEFAULT_TRUNCATION)
    A = _load_algebra(args.algebra)
    lines = []
    found_all = True
    if args.bimodule:
        right = _load_algebra(args.right) if args.right else A
        P = _load_over(args.bimodule, A, right).structure
        functor = bimodule_to_functor(P)
        for X, module in functor.modules.items():
            hit = None
            for Y in A.objects():
                result = is_representable_on_object(module, Y, length)
                if result:
                    hit = (Y, result)
                    break
            found_all &= hit is not None
            value = "true" if hit else "false"
            extra = f" by={hit[0]} witness={_quote(hit[1].reason)}" if hit else ""
            lines.append(f"REPRESENTABLE object={X} value={value}{extra}")
        for a in functor.order_one_residuals():
            lines.append(f"RESIDUAL kind=functor input={a.name}")
            found_all = False
    else:
        M = _load_over(args.module, A).structure
        Y = _object(args.object)
        result = is_representable_on_object(M, Y, length)
        found_all = result.representable
        detail = f" witness={_quote(result.reason)}" if result else f" reason={_quote(result.reason)}"
        lines.append(f"REPRESENTABLE object={Y} value={'true' if result else 'false'}{detail}")
    return (0 if found_all else 1), lines


def cmd_tensor(args, store) -> Report:
    A, B = _load_algebra(args.left), _load_algebra(args.right)
    AB, BA = tensor_dg(A, B), tensor_dg(B, A)
    swap_ok = is_dga_isomorphism(AB, BA, tensor_swap(A, B))
    bound = resolve_bound(args.max_arity, "AINFTY_MAX_ARITY", store, "max_arity", default_max_arity(AB.kmax))
    report = check_relations(AB, bound)
    lines = [f"RESIDUAL {r.line(AB.basis.order)}" for r in report.residuals]
    if args.output:
        dump(args.output, AB)
    lines.append(f"{'OK' if swap_ok else 'RESIDUAL'} kind=tensor name={AB.name} rank={len(AB.basis)} "
                 f"swap_iso={'true' if swap_ok else 'false'}")
    return (0 if swap_ok and not report else 1), lines


def cmd_trees(args, store) -> Report:
    if args.boundary:
        shape = parse_shape(args.boundary)
        stratum = StratumDescriptor.of(args.moduli, shape)
        strata = boundary_map(stratum)
    else:
        if args.leaves is None or args.codim is None:
            raise EngineError("trees needs --leaves and --codim, or --boundary")
        strata = enumerate_strata(args.moduli, args.leaves, args.codim)
    if args.count_only:
        return 0, [str(len(strata))]
    return 0, [f"STRATUM {s.line()}" for s in strata]


def cmd_limit(args, store) -> Report:
    document = load(args.complex)
    if not isinstance(document.structure, FiniteComplex):
        raise SemanticError(f"{args.complex} holds a {document.kind}, expected a complex")
    system = filtration_system(document.structure)
    result = direct_limit(system)
    lines = [result.line()]
    lines += [f"DEGREE {line}" for line in cohomology(result.complex).lines()]
    for d, ok in enumerate(stagewise_quasi_isomorphisms(system)):
        if not ok:
            lines.append(f"RESIDUAL kind=quasi_iso stage={d}")
    return (1 if any(line.startswith("RESIDUAL") for line in lines) else 0), lines


COMMANDS: Dict[str, Callable] = {
    "check": cmd_check,
    "deform": cmd_deform,
    "solve-bc": cmd_solve_bc,
    "cohomology": cmd_cohomology,
    "yoneda": cmd_yoneda,
    "representable": cmd_representable,
    "tensor": cmd_tensor,
    "trees": cmd_trees,
    "limit": cmd_limit,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ainfty", description="Exact curved A-infinity computations over Z")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--store", help="sqlite settings and run store")
    jaraco.logging.add_arguments(parser, default_level=logging.WARNING)
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("check", help="check relations of an algebra, module or bimodule")
    p.add_argument("algebra")
    p.add_argument("--module")
    p.add_argument("--bimodule")
    p.add_argument("--right", action="append", help="right algebra of a bimodule")
    p.add_argument("--max-arity", type=int)

    p = commands.add_parser("deform", help="deform an algebra by a degree-one element")
    p.add_argument("algebra")
    p.add_argument("--b", required=True, help="element such as '1*x - 2*y'")
    p.add_argument("--output")
    p.add_argument("--max-insertions", type=int)
    p.add_argument("--max-arity", type=int)

    p = commands.add_parser("solve-bc", help="bounding cochain from a cyclic element")
    p.add_argument("algebra")
    p.add_argument("--module", required=True)
    p.add_argument("--cyclic")

    p = commands.add_parser("cohomology", help="integer cohomology of a complex, flat algebra or module")
    p.add_argument("file")
    p.add_argument("--algebra")

    p = commands.add_parser("yoneda", help="lambda map and bar page checks")
    p.add_argument("algebra")
    p.add_argument("--object")
    p.add_argument("--module")
    p.add_argument("--length", type=int)

    p = commands.add_parser("representable", help="representability of modules or bimodules")
    p.add_argument("algebra")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--module")
    group.add_argument("--bimodule")
    p.add_argument("--right")
    p.add_argument("--object")
    p.add_argument("--length", type=int)

    p = commands.add_parser("tensor", help="tensor product of two dgas")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--output")
    p.add_argument("--max-arity", type=int)

    p = commands.add_parser("trees", help="strata of associahedra and multiplihedra")
    p.add_argument("--moduli", choices=(ASSOCIAHEDRON, MULTIPLIHEDRON), default=ASSOCIAHEDRON)
    p.add_argument("--leaves", type=int)
    p.add_argument("--codim", type=int)
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--boundary", help="stratum encoding whose boundary is listed")

    p = commands.add_parser("limit", help="direct limit of the filtered truncations of a complex")
    p.add_argument("complex")
    return parser


def _inputs_digest(argv: List[str], store_path: Optional[str] = None) -> str:
    """Digest of the arguments and of every input file they name; the store itself is skipped."""
    contents = []
    for token in argv:
        if token == store_path or not os.path.isfile(token):
            continue
        with open(token, "rb") as f:
            contents.append(f.read().decode("utf-8", errors="replace"))
    return digest(*argv, *contents)


def run(argv: Optional[List[str]] = None, out=print) -> int:
    """
    Parse arguments, run one command and print its report.

    Returns:
        0 on a clean report, 1 on findings, 2 on errors
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    jaraco.logging.setup(args)
    store = EngineStore(args.store) if args.store else None
    try:
        code, lines = COMMANDS[args.command](args, store)
    except (EngineError, OSError) as e:
        code, lines = 2, [f"ERROR kind={type(e).__name__} message={_quote(str(e))}"]
        logger.error(f"{args.command} failed: {e}")
    for line in lines:
        out(line)
    if store is not None:
        argv_list = list(argv) if argv is not None else sys.argv[1:]
        run_digest = _inputs_digest(argv_list, args.store)
        report = "\n".join(lines)
        previous = store.last_report(args.command, run_digest)
        if previous is not None and previous != report:
            logger.warning(f"{args.command} produced a different report for identical inputs")
        store.record_run(args.command, shlex.join(argv_list), run_digest, code, report)
    return code
