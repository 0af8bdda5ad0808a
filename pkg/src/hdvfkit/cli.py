"""``hdvfkit`` command line.

Every command prints one JSON result document on stdout and exits with 0 on
success, 1 on a library or input error (the document's ``report`` then holds
the message and its witness) and 2 on bad usage.
"""

from __future__ import annotations

import argparse
import sys

from hdvfkit import io as hio
from hdvfkit.complex import ChainComplex, build_cubical
from hdvfkit.explicit import (
    HomologyBasis,
    check_characterizations,
    hdvf_from_explicit_basis,
    is_explicit,
)
from hdvfkit.hdvf import all_critical, complete
from hdvfkit.persistence import Filtration, compute_persistence, persistence_oracle
from hdvfkit.tripartition import hdvf_to_tripartitions, validate_tripartition


class CommandError(Exception):
    """Failure with a ready-made result document."""

    def __init__(self, message: str, **fields):
        super().__init__(message)
        self.fields = fields


def _load_complex(args) -> ChainComplex:
    if args.cubical:
        grid = hio.parse_grid(hio.read_text(args.cubical))
        if not grid:
            return ChainComplex([], {})
        return build_cubical(grid)
    if not args.complex:
        raise CommandError("no input: give a complex file or --cubical grid.txt")
    return hio.parse_complex(hio.read_text(args.complex))


def _load_filtration(args) -> Filtration:
    if args.cubical:
        grid = hio.parse_grid(hio.read_text(args.cubical))
        if not grid:
            return Filtration(ChainComplex([], {}))
        return Filtration.from_grid(grid)
    if not args.filtration:
        raise CommandError("no input: give a filtration file or --cubical grid.txt")
    return hio.parse_filtration(hio.read_text(args.filtration))


def _betti(k: ChainComplex) -> dict[str, int]:
    return {str(q): k.betti(q) for q in range(k.n + 1)}


def _basis(args, k: ChainComplex) -> HomologyBasis:
    groups = hio.parse_basis(hio.read_text(args.basis), k)
    if len(groups) > 1:
        raise CommandError(f"basis file mixes dimensions {sorted(groups)}; use one dimension per file")
    if groups:
        q, gens = next(iter(groups.items()))
        if args.dim is not None and args.dim != q:
            raise CommandError(f"--dim {args.dim} does not match the basis dimension {q}")
    else:
        q, gens = (1 if args.dim is None else args.dim), []
    return HomologyBasis(k, q, gens)


def cmd_homology(args) -> dict:
    k = _load_complex(args)
    x = complete(all_critical(k))
    gens = {}
    for q in range(k.n + 1):
        chains = x.cohomology_basis(q) if args.cohomology else x.homology_basis(q)
        gens[str(q)] = [hio.chain_ids(k, c) for c in chains]
    kind = "cohomology" if args.cohomology else "homology"
    return hio.result_document(
        betti=_betti(k),
        generators=gens,
        hdvf=hio.sorted_labels(k, x.labels),
        report=f"perfect HDVF with {len(x.critical())} critical cells; {kind} generators listed",
        verdict=True,
    )


def cmd_check_explicit(args) -> dict:
    k = _load_complex(args)
    basis = _basis(args, k)
    report = is_explicit(basis)
    text = report.message
    if args.all_characterizations:
        ch = check_characterizations(basis, limit=args.limit)
        text += (
            f"; characterizations: private+injective={ch.private_and_injective}, "
            f"cycles-in-span={ch.cycles_in_span}, private+dimension={ch.private_and_dimension}"
        )
        if not ch.agree:
            raise CommandError("characterizations disagree: " + text, verdict=None)
    return hio.result_document(
        betti={str(basis.q): len(basis)},
        generators={str(basis.q): [hio.chain_ids(k, g) for g in basis.generators]},
        report=text,
        verdict=report.explicit,
    )


def cmd_basis_to_hdvf(args) -> dict:
    k = _load_complex(args)
    basis = _basis(args, k)
    x = hdvf_from_explicit_basis(basis)
    produced = x.homology_basis(basis.q)
    same = sorted(map(str, produced)) == sorted(map(str, basis.generators)) and len(produced) == len(basis)
    return hio.result_document(
        betti=_betti(k),
        generators={str(basis.q): [hio.chain_ids(k, g) for g in produced]},
        hdvf=hio.sorted_labels(k, x.labels),
        report=f"perfect HDVF realizing the basis; round trip {'ok' if same else 'FAILED'}",
        verdict=same,
    )


def cmd_persistence(args) -> dict:
    f = _load_filtration(args)
    result = compute_persistence(f)
    diagram = result.diagram
    text = f"{len(f)} cells, {len(diagram)} points"
    if args.oracle:
        other = persistence_oracle(f)
        if other != diagram:
            raise CommandError(
                "diagram differs from the column-reduction oracle",
                diagram=hio.diagram_rows(diagram),
                verdict=False,
            )
        text += "; oracle agrees"
    if args.csv:
        hio.write_text(args.csv, hio.diagram_csv(diagram))
    if args.svg:
        hio.write_text(args.svg, hio.diagram_svg(diagram))
    k = f.complex
    gens: dict[str, list] = {}
    for g in result.generators:
        gens.setdefault(str(g.q), []).append(hio.chain_ids(k, g.chain))
    return hio.result_document(
        betti=_betti(k),
        generators=gens,
        diagram=hio.diagram_rows(diagram),
        hdvf=hio.sorted_labels(k, result.final.labels),
        report=text,
        verdict=True,
    )


def cmd_tripartition(args) -> dict:
    if args.dim < 0:
        raise CommandError(f"invalid dimension {args.dim}")
    k = _load_complex(args)
    x = complete(all_critical(k))
    layers = {t.q: t for t in hdvf_to_tripartitions(x)}
    t = layers.get(args.dim)
    if t is None:
        part = {"q": args.dim, "cotree": [], "tree": [], "essential": []}
        text = f"no {args.dim}-cells"
    else:
        ok = validate_tripartition(k, t)
        part = {
            "q": t.q,
            "cotree": k.sorted_ids(t.cotree),
            "tree": k.sorted_ids(t.tree),
            "essential": k.sorted_ids(t.essential),
        }
        text = "valid tri-partition" if ok else "invalid tri-partition: " + "; ".join(ok.problems)
    return hio.result_document(
        betti=_betti(k),
        hdvf=hio.sorted_labels(k, x.labels),
        tripartition=part,
        report=text,
        verdict=True,
    )


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hdvfkit", description="GF(2) homology through HDVFs.")
    p.add_argument("--output", "-o", help="write the JSON document here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    def complex_input(sp, name="complex"):
        sp.add_argument(name, nargs="?", help=f"{name} file")
        sp.add_argument("--cubical", metavar="GRID", help="read a 2D cubical grid instead")

    sp = sub.add_parser("homology", help="Betti numbers, generators and a perfect HDVF")
    complex_input(sp)
    sp.add_argument("--cohomology", action="store_true", help="list cohomology generators instead")
    sp.set_defaults(run=cmd_homology)

    for name, fn, helptext in (
        ("check-explicit", cmd_check_explicit, "decide whether a homology basis is explicit"),
        ("basis-to-hdvf", cmd_basis_to_hdvf, "perfect HDVF realizing an explicit basis"),
    ):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("complex", nargs="?", help="complex file (omit with --cubical)")
        sp.add_argument("basis", help="basis file, lines '<q> <cells...>'")
        sp.add_argument("--cubical", metavar="GRID", help="read a 2D cubical grid instead")
        sp.add_argument("--dim", type=int, help="dimension of an empty basis (default 1)")
        if name == "check-explicit":
            sp.add_argument("--all-characterizations", action="store_true")
            sp.add_argument("--limit", type=int, default=6, help="largest basis for the brute-force check")
        sp.set_defaults(run=fn)

    sp = sub.add_parser("persistence", help="persistence diagram of a filtration")
    complex_input(sp, "filtration")
    sp.add_argument("--svg", help="write the diagram as SVG")
    sp.add_argument("--csv", help="write the diagram as CSV")
    sp.add_argument("--oracle", action="store_true", help="cross-check with column reduction")
    sp.set_defaults(run=cmd_persistence)

    sp = sub.add_parser("tripartition", help="tri-partition of one dimension")
    complex_input(sp)
    sp.add_argument("--dim", type=int, required=True)
    sp.set_defaults(run=cmd_tripartition)
    return p


def _check_inputs(args):
    if getattr(args, "cubical", None) and (getattr(args, "complex", None) or getattr(args, "filtration", None)):
        raise CommandError("give either an input file or --cubical, not both")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _check_inputs(args)
        doc = args.run(args)
        code = 0
    except CommandError as exc:
        doc = hio.result_document(report=f"error: {exc}", **{"verdict": False, **exc.fields})
        code = 1
    except (OSError, ValueError, ArithmeticError, RuntimeError) as exc:
        witness = hio.error_witness(exc)
        msg = f"error: {exc}" + (f" [witness: {witness}]" if witness else "")
        doc = hio.result_document(report=msg, verdict=False)
        code = 1
    text = hio.dump_document(doc)
    if args.output:
        hio.write_text(args.output, text)
    else:
        sys.stdout.write(text)
    if code:
        sys.stderr.write(doc["report"] + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
