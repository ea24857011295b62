"""
ProofReport serialization. Every rational is a "p/q" string, so a dumped report parses back to
an equal report and re-dumps to the same bytes.
"""
from __future__ import annotations

import csv
import io
import json
from typing import Any, Dict, Iterable, List, Sequence

from .exactnum import format_decimal, format_rat, mat, parse_rat, vec
from .hlrverify import Check, EquationRecord, Equality, EqualityVerdict, ProofReport, Strict


Json = Dict[str, Any]


class ReportFormatError(Exception):
    pass


def _rats(xs: Iterable) -> List[str]:
    return [format_rat(x) for x in xs]


def _check_json(c: Check) -> Json:
    return {'name': c.name, 'pass': c.passed, 'detail': c.detail}


def _verdict_json(v: EqualityVerdict) -> Json:
    if isinstance(v, Equality):
        return {
            'type': 'Equality',
            'semi_axes_sq': _rats(v.semi_axes_sq),
            'k': v.k,
            'delaunay_vertices': [list(p) for p in v.delaunay_vertices],
            'checks': [_check_json(c) for c in v.checks],
        }
    return {
        'type': 'Strict',
        'gap': format_rat(v.gap),
        'first_failure': v.first_failure,
        'checks': [_check_json(c) for c in v.checks],
    }


def _record_json(r: EquationRecord) -> Json:
    res: Json = {
        'eq': r.eq,
        'lhs': format_rat(r.lhs),
        'rhs': format_rat(r.rhs),
        'relation': r.relation,
        'pass': r.passed,
    }
    if r.detail:
        res['detail'] = r.detail
    return res


def to_json(report: ProofReport, *, timings: bool = True) -> Json:
    res: Json = {
        'lattice': report.name,
        'n': report.n,
        'gram': [_rats(row) for row in report.gram],
        'deep_hole': _rats(report.deep_hole),
        'R2': format_rat(report.r_sq),
        'volume': format_rat(report.volume),
        'second_moment': format_rat(report.second_moment),
        'ratio': format_rat(report.ratio),
        'k': report.k,
        'records': [_record_json(r) for r in report.records],
        'verdict': _verdict_json(report.verdict),
    }
    if timings and report.elapsed is not None:
        res['elapsed'] = report.elapsed
    return res


def _checks(js: List[Json]) -> tuple[Check, ...]:
    return tuple(Check(name=c['name'], passed=c['pass'], detail=c['detail']) for c in js)


def _verdict(js: Json) -> EqualityVerdict:
    kind = js['type']
    if kind == 'Equality':
        return Equality(
            semi_axes_sq=vec(js['semi_axes_sq']),
            k=js['k'],
            delaunay_vertices=tuple(tuple(p) for p in js['delaunay_vertices']),
            checks=_checks(js['checks']),
        )
    if kind == 'Strict':
        return Strict(gap=parse_rat(js['gap']), first_failure=js['first_failure'], checks=_checks(js['checks']))
    raise ReportFormatError(f'unknown verdict type {kind!r}')


def from_json(js: Json) -> ProofReport:
    try:
        return ProofReport(
            name=js['lattice'],
            gram=mat(js['gram']),
            deep_hole=vec(js['deep_hole']),
            r_sq=parse_rat(js['R2']),
            volume=parse_rat(js['volume']),
            second_moment=parse_rat(js['second_moment']),
            k=js['k'],
            records=tuple(
                EquationRecord(
                    eq=r['eq'],
                    lhs=parse_rat(r['lhs']),
                    rhs=parse_rat(r['rhs']),
                    relation=r['relation'],
                    passed=r['pass'],
                    detail=r.get('detail', ''),
                )
                for r in js['records']
            ),
            verdict=_verdict(js['verdict']),
            elapsed=js.get('elapsed'),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ReportFormatError(f'malformed report: {e}') from e


def dumps(reports: Sequence[ProofReport], *, timings: bool = True) -> str:
    '''
    A single report is written as an object, several as a list.
    '''
    items = [to_json(r, timings=timings) for r in reports]
    js: Any = items[0] if len(items) == 1 else items
    return json.dumps(js, indent=2, ensure_ascii=False) + '\n'


def loads(s: str) -> List[ProofReport]:
    js = json.loads(s)
    if isinstance(js, dict):
        js = [js]
    return [from_json(x) for x in js]


CSV_COLUMNS = ('name', 'n', 'R2', 'volume', 'moment', 'ratio', 'ratio_decimal', 'verdict')


def to_csv(reports: Iterable[ProofReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator='\n')
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow([
            r.name,
            r.n,
            format_rat(r.r_sq),
            format_rat(r.volume),
            format_rat(r.second_moment),
            format_rat(r.ratio),
            format_decimal(r.ratio, 12),
            type(r.verdict).__name__,
        ])
    return buf.getvalue()


def to_text(report: ProofReport) -> str:
    v = report.verdict
    lines = [
        f'{report.name or "lattice"} (n={report.n}): R²={format_rat(report.r_sq)} |P|={format_rat(report.volume)} ∫={format_rat(report.second_moment)}',
        f'  deep hole {_rats(report.deep_hole)}, {report.k} pieces, ratio {format_rat(report.ratio)} ≈ {format_decimal(report.ratio, 12)}',
    ]
    for rec in report.records:
        mark = 'ok  ' if rec.passed else 'FAIL'
        lines.append(f'  {mark} {rec.eq:<6} {format_rat(rec.lhs)} {rec.relation} {format_rat(rec.rhs)}' + (f'  [{rec.detail}]' if rec.detail else ''))
    if isinstance(v, Equality):
        lines.append(f'  verdict: Equality, semi-axes² {_rats(v.semi_axes_sq)}')
    else:
        lines.append(f'  verdict: Strict, gap {format_rat(v.gap)} (first failing check: {v.first_failure})')
    return '\n'.join(lines) + '\n'
