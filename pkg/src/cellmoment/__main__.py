from __future__ import annotations

import argparse
import csv
from concurrent.futures import ProcessPoolExecutor as Pool
from contextlib import nullcontext
import io
import itertools
import json
from pathlib import Path
import sys
from typing import Any, Dict, List, NamedTuple, Optional, Sequence

from . import config
from .catalog import CatalogEntry, all_entries, by_name, describe, entry, random_grams
from .common import Res, logger
from .exactnum import ExactError, format_rat
from .hlrverify import ProofReport, verify_all_deep_holes, verify_main
from .lattice import from_basis, new_lattice
from .polytope import DimensionCapExceeded, dump, second_moment, volume
from .report import dumps, to_csv, to_text
from .voronoi import covering_radius_sq, normalized_second_moment, voronoi_cell


EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INCONSISTENT = 3


class InputError(Exception):
    pass


# anything else escaping a verification run is a bug, reported with EXIT_INCONSISTENT
INPUT_ERRORS = (InputError, ExactError, DimensionCapExceeded, config.ConfigError)


def _parse_matrix(s: str, what: str) -> Any:
    try:
        return json.loads(s)
    except json.JSONDecodeError as e:
        raise InputError(f"couldn't parse {what} {s!r}: {e}") from e


def _entry(name: str, gram: Any = None, *, basis: Any = None, note: str = '') -> CatalogEntry:
    try:
        if basis is not None:
            gram = from_basis(basis).gram
        return entry(name, gram, note=note)
    except (TypeError, ValueError) as e:
        raise InputError(f'{name}: not a rational matrix: {e}') from e


def _from_json(js: Any, default_name: str) -> CatalogEntry:
    if not isinstance(js, dict):
        raise InputError(f'expected an object with "gram" or "basis", got {type(js).__name__}')
    name = js.get('name', default_name)
    if 'gram' in js:
        e = _entry(name, js['gram'], note='from file')
    elif 'basis' in js:
        e = _entry(name, basis=js['basis'], note='from file (basis)')
    else:
        raise InputError(f'{name}: expected "gram" or "basis"')
    n = js.get('n')
    if n is not None and (isinstance(n, bool) or n != len(e.gram)):
        raise InputError(f'{name}: "n" is {n!r} but the lattice has dimension {len(e.gram)}')
    return e


def lattice_inputs(args: argparse.Namespace) -> List[CatalogEntry]:
    res: List[CatalogEntry] = []
    for name in args.name or []:
        try:
            res.append(by_name(name))
        except KeyError as e:
            raise InputError(e.args[0]) from e
    if args.gram is not None:
        res.append(_entry('gram', _parse_matrix(args.gram, 'gram')))
    if args.basis is not None:
        res.append(_entry('basis', basis=_parse_matrix(args.basis, 'basis')))
    if args.file is not None:
        path = Path(args.file)
        try:
            js = json.loads(path.read_text(encoding='utf-8'))
        except (OSError, json.JSONDecodeError) as e:
            raise InputError(f"couldn't read {path}: {e}") from e
        items = js if isinstance(js, list) else [js]
        res.extend(_from_json(x, default_name=f'{path.stem}-{i}') for i, x in enumerate(items))
    if len(res) == 0:
        raise InputError('no lattice given: use --name, --gram, --basis or --file')
    return res


class Options(NamedTuple):
    cap: int
    all_deep_holes: bool
    mc_samples: int
    seed: int


def _verify_one(e: CatalogEntry, opts: Options) -> Res[ProofReport]:
    # returns the exception, so a batch keeps going
    try:
        lat = new_lattice(e.gram)
        report = verify_main(lat, name=e.name, cap=opts.cap)
        if opts.all_deep_holes:
            for hole, verdict in verify_all_deep_holes(lat, cap=opts.cap):
                logger.info('%s: deep hole %s -> %s', e.name, [format_rat(x) for x in hole.t], type(verdict).__name__)
        if opts.mc_samples > 0:
            from .montecarlo import estimate
            mc = estimate(voronoi_cell(lat, cap=opts.cap), opts.mc_samples, opts.seed)
            logger.info('%s: montecarlo deviation volume %.4f, moment %.4f', e.name, mc.volume_deviation, mc.moment_deviation)
        return report
    except Exception as ex:
        return ex


def run_batch(entries: Sequence[CatalogEntry], opts: Options) -> List[Res[ProofReport]]:
    cores = config.use_cores()
    if cores is None or len(entries) <= 1:
        pool: Any = nullcontext()
        mapper: Any = map
    else:
        workers = None if cores == 0 else cores
        pool = Pool(workers)
        mapper = pool.map
    with pool:
        # map keeps input order
        return list(mapper(_verify_one, entries, itertools.repeat(opts)))


def _write(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding='utf-8')
        logger.info('wrote %s', out)


def _target(args: argparse.Namespace, cfg: config.RunConfig, stem: str) -> Optional[Path]:
    # --out wins, then OUTPUT_DIR (or the user data dir with --save), otherwise stdout
    if args.out is not None:
        return args.out
    if cfg.OUTPUT_DIR is None and not args.save:
        return None
    return cfg.output_dir / f'{stem}.{cfg.FORMAT}'


def _emit(reports: Sequence[ProofReport], fmt: str, out: Optional[Path], *, timings: bool) -> None:
    if fmt == 'json':
        text = dumps(reports, timings=timings)
    elif fmt == 'csv':
        text = to_csv(reports)
    else:
        text = ''.join(to_text(r) for r in reports)
    _write(text, out)


def _exit_code(results: Sequence[Res[ProofReport]]) -> int:
    code = EXIT_OK
    for r in results:
        if isinstance(r, INPUT_ERRORS):
            logger.error('%s', r)
            code = max(code, EXIT_INPUT)
        elif isinstance(r, Exception):
            logger.exception(r)
            code = EXIT_INCONSISTENT
        elif not r.passed:
            logger.error('%s: some records failed', r.name)
            code = EXIT_INCONSISTENT
    return code


def _options(cfg: config.RunConfig) -> Options:
    return Options(cap=cfg.cap, all_deep_holes=cfg.ALL_DEEP_HOLES, mc_samples=cfg.MC_SAMPLES, seed=cfg.SEED)


def cmd_verify(args: argparse.Namespace, cfg: config.RunConfig) -> int:
    entries = lattice_inputs(args)
    results = run_batch(entries, _options(cfg))
    reports = [r for r in results if not isinstance(r, Exception)]
    if reports:
        stem = entries[0].name if len(entries) == 1 else 'batch'
        _emit(reports, cfg.FORMAT, _target(args, cfg, stem), timings=len(entries) == 1)
    return _exit_code(results)


def cmd_random(args: argparse.Namespace, cfg: config.RunConfig) -> int:
    if args.dim > cfg.cap:
        raise InputError(f'dimension {args.dim} is above the cap {cfg.cap}')
    try:
        entries = random_grams(args.dim, args.count, cfg.SEED, diagonal_only=args.diagonal_only, perturb=args.perturb)
    except ValueError as e:
        raise InputError(str(e)) from e
    results = run_batch(entries, _options(cfg))
    reports = [r for r in results if not isinstance(r, Exception)]
    target = _target(args, cfg, f'random-n{args.dim}-s{cfg.SEED}')
    _emit(reports, cfg.FORMAT, target, timings=False)
    if cfg.FORMAT == 'json':
        # the summary table goes next to the reports, or to stderr when they go to stdout
        summary = to_csv(reports)
        if target is None:
            sys.stderr.write(summary)
        else:
            _write(summary, target.with_name(f'{target.stem}.summary.csv'))
    return _exit_code(results)


CELL_COLUMNS = ('lattice', 'R2', 'volume', 'second_moment', 'normalized_second_moment', 'facets', 'vertices')


def _cell_csv(rows: Sequence[Dict[str, Any]]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CELL_COLUMNS, extrasaction='ignore', lineterminator='\n')
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def cmd_cell(args: argparse.Namespace, cfg: config.RunConfig) -> int:
    res = []
    for e in lattice_inputs(args):
        lat = new_lattice(e.gram)
        cell = voronoi_cell(lat, cap=cfg.cap)
        summary = {
            'lattice': e.name,
            'R2': format_rat(covering_radius_sq(lat, cell)),
            'volume': format_rat(volume(cell)),
            'second_moment': format_rat(second_moment(cell)),
            'normalized_second_moment': normalized_second_moment(lat, cell),
            'facets': len(cell.halfspaces),
            'vertices': len(cell.vertices),
        }
        res.append({**summary, 'polytope': dump(cell)})
    if cfg.FORMAT == 'json':
        _write(json.dumps(res[0] if len(res) == 1 else res, indent=2, ensure_ascii=False) + '\n', args.out)
    elif cfg.FORMAT == 'csv':
        _write(_cell_csv(res), args.out)
    else:
        lines = [
            f"{r['lattice']}: R²={r['R2']} |P|={r['volume']} ∫={r['second_moment']} G={r['normalized_second_moment']:.6f} ({r['facets']} facets, {r['vertices']} vertices)\n"
            for r in res
        ]
        if args.out is not None:
            # the dump goes to the file, the summary to stdout
            _write(json.dumps([r['polytope'] for r in res] if len(res) > 1 else res[0]['polytope'], indent=2) + '\n', args.out)
        sys.stdout.write(''.join(lines))
    return EXIT_OK


def cmd_montecarlo(args: argparse.Namespace, cfg: config.RunConfig) -> int:
    from .montecarlo import estimate

    samples = args.samples if args.samples is not None else (cfg.MC_SAMPLES or 10 ** 6)
    if samples <= 0:
        raise InputError(f'need a positive number of samples, got {samples}')
    for e in lattice_inputs(args):
        cell = voronoi_cell(new_lattice(e.gram), cap=cfg.cap)
        mc = estimate(cell, samples, cfg.SEED)
        print(f'{e.name}: {samples} samples, volume {mc.volume:.6f} (exact {mc.exact_volume:.6f}, deviation {mc.volume_deviation:.2%}), '
              f'moment {mc.second_moment:.6f} (exact {mc.exact_second_moment:.6f}, deviation {mc.moment_deviation:.2%})')
    return EXIT_OK


def cmd_catalog(args: argparse.Namespace, cfg: config.RunConfig) -> int:
    entries = describe(all_entries())
    if cfg.FORMAT == 'json':
        _write(json.dumps(entries, indent=2, ensure_ascii=False) + '\n', args.out)
    elif cfg.FORMAT == 'csv':
        lines = ['name,n,R2,ratio,verdict\n'] + [f"{e['name']},{e['n']},{e['R2'] or ''},{e['ratio'] or ''},{e['verdict'] or ''}\n" for e in entries]
        _write(''.join(lines), args.out)
    else:
        for e in entries:
            print(f"{e['name']:<12} n={e['n']}  R²={e['R2'] or '?':<5} ratio={e['ratio'] or '?':<4} {e['note']}")
    return EXIT_OK


def _load_config(args: argparse.Namespace) -> config.RunConfig:
    cfg = config.import_config(args.config) if args.config is not None else config.RunConfig()
    overrides = {}
    if args.cap is not None:
        overrides['CAP'] = args.cap
    if args.format is not None:
        overrides['FORMAT'] = args.format
    if getattr(args, 'all_deep_holes', False):
        overrides['ALL_DEEP_HOLES'] = True
    if getattr(args, 'mc_samples', None) is not None:
        overrides['MC_SAMPLES'] = args.mc_samples
    if args.seed is not None:
        overrides['SEED'] = args.seed
    cfg = cfg._replace(**overrides)
    cfg.check()
    return cfg


def main(argv: Optional[Sequence[str]] = None) -> None:
    F = lambda prog: argparse.ArgumentDefaultsHelpFormatter(prog, width=120)
    p = argparse.ArgumentParser(prog='cellmoment', description='Exact Voronoi cell moments and covering radius bound verification', formatter_class=F)  # type: ignore
    subp = p.add_subparsers(dest='mode')

    def add_common_args(sp: argparse.ArgumentParser) -> None:
        sp.add_argument('--config', type=Path, default=None, help='Python config file (see doc/config.py)')
        sp.add_argument('--cap', type=int, default=None, help=f'Dimension cap (default {config.DEFAULT_CAP}, env HLR_CAP overrides the config)')
        sp.add_argument('--format', choices=config.FORMATS, default=None, help='Output format (default: text)')
        sp.add_argument('--out', type=Path, default=None, help='Write the output here instead of stdout')
        sp.add_argument('--seed', type=int, default=None, help='Random seed')

    def add_lattice_args(sp: argparse.ArgumentParser) -> None:
        sp.add_argument('--name', action='append', help='Catalog lattice name (repeatable)')
        sp.add_argument('--gram', type=str, help="Gram matrix as JSON, e.g. '[[1,\"1/2\"],[\"1/2\",1]]'")
        sp.add_argument('--basis', type=str, help='Basis as JSON, one basis vector per column')
        sp.add_argument('--file', type=Path, help='JSON file with {"name", "gram"|"basis"} objects')

    cp = subp.add_parser('catalog', help='List the built-in lattices', formatter_class=F)
    add_common_args(cp)

    ep = subp.add_parser('cell', help='Voronoi cell, covering radius and second moment', formatter_class=F)
    add_common_args(ep)
    add_lattice_args(ep)

    vp = subp.add_parser('verify', help='Verify the covering radius bound and classify the equality case', formatter_class=F)
    add_common_args(vp)
    add_lattice_args(vp)
    vp.add_argument('--all-deep-holes', action='store_true', help='Classify from every deep hole, not just the first')
    vp.add_argument('--mc-samples', type=int, default=None, help='Monte-Carlo cross-check with this many samples (0: off)')
    vp.add_argument('--save', action='store_true', help='Write the report into OUTPUT_DIR (the user data dir if unset)')

    rp = subp.add_parser('random', help='Verify a batch of seeded random lattices', formatter_class=F)
    add_common_args(rp)
    rp.add_argument('--dim', '-n', type=int, default=2, help='Dimension')
    rp.add_argument('--count', type=int, default=20, help='Number of lattices')
    rp.add_argument('--diagonal-only', action='store_true', help='Only rectangular lattices')
    rp.add_argument('--perturb', action='store_true', help='Set the (0, 1) Gram entry to 1/10')
    rp.add_argument('--all-deep-holes', action='store_true', help='Classify from every deep hole, not just the first')
    rp.add_argument('--mc-samples', type=int, default=None, help='Monte-Carlo cross-check with this many samples (0: off)')
    rp.add_argument('--save', action='store_true', help='Write the report into OUTPUT_DIR (the user data dir if unset)')

    mp = subp.add_parser('montecarlo', help='Floating point cross-check of volume and second moment', formatter_class=F)
    add_common_args(mp)
    add_lattice_args(mp)
    mp.add_argument('--samples', '--mc-samples', dest='samples', type=int, default=None, help='Number of samples (default 10^6)')

    args = p.parse_args(argv)

    mode: Optional[str] = args.mode
    if mode is None:
        print('ERROR: Please specify a mode', file=sys.stderr)
        p.print_help(sys.stderr)
        sys.exit(EXIT_INPUT)

    logger.debug('CLI args: %s', args)

    handlers = {
        'catalog': cmd_catalog,
        'cell': cmd_cell,
        'verify': cmd_verify,
        'random': cmd_random,
        'montecarlo': cmd_montecarlo,
    }
    try:
        cfg = _load_config(args)
        config.instance = cfg
        try:
            code = handlers[mode](args, cfg)
        finally:
            config.reset()
    except INPUT_ERRORS as e:
        logger.error('%s', e)
        sys.exit(EXIT_INPUT)
    except Exception as e:
        logger.exception(e)
        sys.exit(EXIT_INCONSISTENT)
    sys.exit(code)


if __name__ == '__main__':
    main()
