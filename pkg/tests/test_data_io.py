import dataclasses
import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import flat_context
from wadeoil import (
    DataError,
    DuplicateYear,
    ModelParams,
    Series,
    SweepSpec,
    ValidationError,
    make_grid,
    run_initial_sweep,
    solve_pmp,
)
from wadeoil.data_io import (
    AnnualRecord,
    fixture_path,
    load_annual_csv,
    parse_annual_csv,
    read_table,
    resample,
    write_result_csv,
    yearly_grid,
)
from wadeoil.sweeps import SweepResult


class TestLoad:
    def test_two_records(self):
        recs = parse_annual_csv("year,value\n1981,39\n1986,14")
        assert recs == [AnnualRecord(1981, 39.0), AnnualRecord(1986, 14.0)]

    def test_header_only(self):
        assert parse_annual_csv("year,value\n") == []

    def test_duplicate_year(self):
        with pytest.raises(DuplicateYear) as err:
            parse_annual_csv("year,value\n1999,10\n1999,11")
        assert err.value.line == 3

    def test_crlf_comments_and_stream(self):
        text = "# source: narrative\r\nyear,value\r\n# gap\r\n2000,1.5\r\n\r\n2001,2\r\n"
        recs = load_annual_csv(io.StringIO(text))
        assert [r.value for r in recs] == [1.5, 2.0]

    @pytest.mark.parametrize("text, line", [
        ("year,value\n2000,abc", 2),
        ("year,value\n2000,1,2", 2),
        ("year,value\n2000,nan", 2),
        ("year,value\n2001,1\n2000,1", 3),
        ("yr,val\n2000,1", 1),
    ])
    def test_malformed(self, text, line):
        with pytest.raises(DataError) as err:
            parse_annual_csv(text)
        assert err.value.line == line
        assert f"line {line}" in str(err.value)

    def test_fixture(self):
        recs = load_annual_csv(fixture_path())
        assert [(r.year, r.value) for r in recs] == [
            (1981, 39.0), (1986, 14.0), (1999, 10.0), (2003, 27.0),
            (2004, 35.0), (2008, 127.0), (2011, 103.0),
        ]


class TestResample:
    def test_single_record_step(self):
        recs = [AnnualRecord(2000, 42.0)]
        s = resample(recs, make_grid(2000, 2000.75, 3), "step")
        assert np.all(s.values == 42.0)

    def test_linear_midpoint(self):
        recs = [AnnualRecord(2000, 10.0), AnnualRecord(2001, 20.0)]
        s = resample(recs, make_grid(2000, 2001, 2), "linear")
        assert s.values[1] == 15.0

    @pytest.mark.parametrize("mode", ["step", "linear"])
    def test_aligned_nodes(self, mode):
        recs = [AnnualRecord(y, float(v)) for y, v in [(1980, 3), (1981, 7), (1982, 1), (1983, 4)]]
        s = resample(recs, make_grid(1980, 1983, 3), mode)
        assert list(s.values) == [3.0, 7.0, 1.0, 4.0]

    def test_step_carries_forward_over_gaps(self):
        recs = load_annual_csv(fixture_path())
        s = resample(recs, yearly_grid(recs), "step")
        by_year = dict(zip(s.t.astype(int), s.values))
        assert by_year[1985] == 39.0 and by_year[2002] == 10.0 and by_year[2010] == 127.0
        for r in recs:
            assert by_year[r.year] == r.value

    def test_outside_span(self):
        recs = [AnnualRecord(2000, 1.0), AnnualRecord(2001, 2.0)]
        with pytest.raises(ValidationError):
            resample(recs, make_grid(1999, 2001, 2), "linear")
        with pytest.raises(ValidationError):
            resample(recs, make_grid(2000, 2001.5, 3), "linear")
        resample(recs, make_grid(2000, 2002, 2), "step")

    def test_unknown_mode(self):
        with pytest.raises(ValidationError):
            resample([AnnualRecord(2000, 1.0)], make_grid(2000, 2000.5, 1), "cubic")


class TestResultCsv:
    def test_trajectory_rows_and_round_trip(self, tmp_path):
        g = make_grid(0, 7, 7)
        ctx = flat_context(g, p=43.7, w=0.3)
        traj = solve_pmp(ModelParams(alpha=0.13, c0=0.37), ctx, 12.3, g)
        out = tmp_path / "traj.csv"
        write_result_csv(traj, out)
        lines = out.read_text().splitlines()
        assert lines[0] == "t,R,lambda,a_star,S,H"
        assert len(lines) == 1 + g.n_nodes
        back = read_table(out)
        for col, series in [("R", traj.R), ("lambda", traj.lam), ("a_star", traj.a_star),
                            ("S", traj.S), ("H", traj.H)]:
            assert np.array_equal(back[col], series.values)
        assert np.array_equal(back["t"], g.nodes)

    def test_empty_sweep(self):
        buf = io.StringIO()
        write_result_csv(SweepResult("initial", ()), buf)
        assert buf.getvalue() == "k,t,R,lambda,a_star,S,H\n"

    def test_sweep_prefix(self):
        g = make_grid(0, 3, 3)
        res = run_initial_sweep(SweepSpec(0.0, 3.0, 1.0, 2.0, (0, 3)), ModelParams(), flat_context(g))
        buf = io.StringIO()
        write_result_csv(res, buf)
        lines = buf.getvalue().splitlines()
        assert len(lines) == 1 + 2 * g.n_nodes
        assert lines[1].startswith("0,") and lines[-1].startswith("3,")

    @settings(max_examples=50)
    @given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=4, max_size=4))
    def test_bit_exact(self, vals):
        g = make_grid(0, 3, 3)
        s = Series(g, vals)
        ctx = flat_context(g)
        traj = solve_pmp(ModelParams(), ctx, 1.0, g)
        traj = dataclasses.replace(traj, H=s)
        buf = io.StringIO()
        write_result_csv(traj, buf)
        buf.seek(0)
        assert np.array_equal(read_table(buf)["H"], s.values)
