from __future__ import annotations

import csv
import io
import json

import pytest

from ..catalog import by_name
from ..hlrverify import Equality, Strict, verify_main
from ..lattice import new_lattice
from ..report import CSV_COLUMNS, ReportFormatError, dumps, from_json, loads, to_csv, to_json, to_text


@pytest.fixture(scope='module')
def reports():
    return [verify_main(new_lattice(by_name(n).gram), name=n) for n in ('Z2', 'A2')]


def test_json_roundtrip(reports) -> None:
    for timings in (True, False):
        s = dumps(reports, timings=timings)
        parsed = loads(s)
        assert dumps(parsed, timings=timings) == s
    single = dumps(reports[:1])
    [r] = loads(single)
    assert r == reports[0]
    assert dumps([r]) == single


def test_json_shape(reports) -> None:
    z2, a2 = (to_json(r, timings=False) for r in reports)
    assert 'elapsed' not in z2
    assert z2['R2'] == '1/2'
    assert z2['volume'] == '1'
    assert z2['second_moment'] == '1/6'
    assert z2['verdict']['type'] == 'Equality'
    assert z2['verdict']['semi_axes_sq'] == ['1/4', '1/4']
    assert a2['ratio'] == '5/4'
    assert a2['verdict']['type'] == 'Strict'
    assert a2['verdict']['gap'] == '1/36'
    rec = a2['records'][0]
    assert set(rec) >= {'eq', 'lhs', 'rhs', 'relation', 'pass'}
    assert {r['relation'] for r in a2['records']} == {'=', '>='}
    assert isinstance(from_json(a2).verdict, Strict)
    assert isinstance(from_json(z2).verdict, Equality)


def test_malformed() -> None:
    with pytest.raises(ReportFormatError):
        from_json({'lattice': 'x'})
    with pytest.raises(ReportFormatError):
        loads(json.dumps({'lattice': 'x', 'verdict': {'type': 'Maybe'}}))


def test_csv(reports) -> None:
    rows = list(csv.reader(io.StringIO(to_csv(reports))))
    assert tuple(rows[0]) == CSV_COLUMNS
    z2 = dict(zip(CSV_COLUMNS, rows[1]))
    a2 = dict(zip(CSV_COLUMNS, rows[2]))
    assert z2['ratio'] == '1'
    assert z2['verdict'] == 'Equality'
    assert a2['ratio'] == '5/4'
    assert a2['ratio_decimal'] == '1.250000000000'
    assert a2['verdict'] == 'Strict'
    assert a2['R2'] == '1/3'


def test_text(reports) -> None:
    text = to_text(reports[1])
    assert 'Strict' in text
    assert 'FAIL' not in text
