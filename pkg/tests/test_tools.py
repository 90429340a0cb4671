"""Tests for the simulator tools, called the way the server calls them."""

import json

import pytest

from nvpump.readout.esr import EsrConfig, synthesize_esr_from_config
from nvpump.spin.system import SpinSystem
from nvpump.tools.presets import ListPresetsTool, RunPresetTool
from nvpump.tools.protocol import RunProtocolTool
from nvpump.tools.readout import EstimatePopulationsTool, SynthesizeEsrTool
from nvpump.tools.seqlang import FormatProgramTool, ParseProgramTool
from nvpump.tools.spin import TransitionFrequenciesTool
from nvpump.tools.toy import ToyLimitTool, ToyMonteCarloTool, ToySeriesTool


async def call(tool, arguments):
    """Run a tool and decode its JSON answer."""
    result = await tool.run(arguments)
    assert len(result) == 1
    return json.loads(result[0].text)


async def call_text(tool, arguments):
    return (await tool.run(arguments))[0].text


class TestToyTools:
    """Test the spin-1/2 model tools."""

    async def test_series(self):
        payload = await call(ToySeriesTool(), {"p_a": 1.0, "p_b": 0.01, "n": 3})
        assert payload["q"] == 0.0
        assert [row["target"] for row in payload["rows"]] == pytest.approx(
            [0.5, 0.99, 0.99, 0.99]
        )
        assert payload["closed_form_depleted"] == pytest.approx(0.01)

    async def test_limit(self):
        payload = await call(ToyLimitTool(), {"p_a": 1.0, "p_b": 0.01})
        assert payload["p0_limit"] == pytest.approx(0.99)
        assert payload["cycles_to_converge"] == 1
        assert payload["rf_angle_rad"]["linear"] == pytest.approx(3.141592653589793)

    async def test_limit_undefined(self):
        text = await call_text(ToyLimitTool(), {"p_a": 0.0, "p_b": 0.0})
        assert text.startswith("Error executing nvpump_toy_limit")
        assert "limit undefined" in text

    async def test_monte_carlo(self):
        arguments = {"p_a": 0.5, "p_b": 0.2, "n": 4, "trials": 20_000, "seed": 7}
        payload = await call(ToyMonteCarloTool(), arguments)
        assert payload["trials"] == 20_000
        assert payload["deviation_in_stderr"] < 5

    async def test_bad_probability(self):
        text = await call_text(ToySeriesTool(), {"p_a": 2.0, "p_b": 0.1})
        assert "invalid arguments for nvpump_toy_series" in text


class TestSpinTool:
    """Test the level structure tool."""

    async def test_zero_field_lines(self):
        payload = await call(TransitionFrequenciesTool(), {})
        assert list(payload["esr_lines_mhz"].values()) == pytest.approx(
            [2867.84, 2870.0, 2872.16]
        )
        assert len(payload["lines"]["mw"]) == 6
        assert len(payload["lines"]["rf"]) == 6

    async def test_field_shifts_lines(self):
        payload = await call(TransitionFrequenciesTool(), {"b_field": 30.0})
        assert payload["esr_lines_mhz"]["m_i=0"] == pytest.approx(2029.25)


class TestProtocolTool:
    """Test the protocol tool."""

    async def test_pt(self):
        payload = await call(
            RunProtocolTool(), {"protocol": "pt", "cycles": 2, "flip_probability": 0.2}
        )
        assert len(payload["rows"]) == 3
        assert payload["rows"][-1]["p_0"] == pytest.approx(0.8)
        assert payload["target_index"] == 1
        assert payload["program"][2] == "laser 0.25us repump"

    async def test_se(self):
        payload = await call(RunProtocolTool(), {"protocol": "se", "b_field": 30.0})
        assert payload["rows"][-1]["p_0"] == pytest.approx(1.0)

    async def test_se_collision(self):
        text = await call_text(RunProtocolTool(), {"protocol": "se", "b_field": 0.0})
        assert "Error executing nvpump_run_protocol" in text
        assert "closer than" in text

    async def test_text(self):
        arguments = {
            "protocol": "text",
            "program_text": "mw (0,+1) -> (-1,+1) 1pi\nrf (-1,+1) -> (-1,0) 1pi\n"
            "laser 0.25us repump",
        }
        payload = await call(RunProtocolTool(), arguments)
        final = payload["rows"][-1]
        assert (final["p_plus1"], final["p_0"], final["p_minus1"]) == pytest.approx(
            (0.0, 2 / 3, 1 / 3)
        )

    async def test_text_required(self):
        text = await call_text(RunProtocolTool(), {"protocol": "text"})
        assert "needs program_text" in text

    async def test_unreachable_flip_probability(self):
        text = await call_text(RunProtocolTool(), {"flip_probability": 0.9})
        assert "invalid protocol arguments" in text


class TestSeqTools:
    """Test the program text tools."""

    async def test_parse(self):
        payload = await call(ParseProgramTool(), {"text": "repeat 3 {\nlaser 250ns\n}"})
        assert payload["repeat_count"] == 3
        assert payload["counts"] == {"laser": 1}

    async def test_parse_error_has_location(self):
        text = await call_text(ParseProgramTool(), {"text": "laser 1us\nfoo bar"})
        assert "line 2, column 1" in text

    async def test_format(self):
        text = await call_text(FormatProgramTool(), {"text": "mw (0,-1)->(-1,-1) 0.5pi"})
        assert text == "mw (0,-1) -> (-1,-1) 0.5pi\n"


class TestReadoutTools:
    """Test spectrum synthesis and estimation tools."""

    async def test_synthesize(self):
        payload = await call(
            SynthesizeEsrTool(), {"fractions": [0.1, 0.8, 0.1], "b_field": 30.0}
        )
        assert payload["estimated_fractions"] == pytest.approx([0.1, 0.8, 0.1], abs=1e-9)
        assert "trace" not in payload

    async def test_synthesize_with_trace(self):
        arguments = {"fractions": [0.1, 0.8, 0.1], "n_points": 101, "include_trace": True}
        payload = await call(SynthesizeEsrTool(), arguments)
        assert len(payload["trace"]["freq_mhz"]) == 101

    async def test_synthesize_unresolved(self):
        text = await call_text(
            SynthesizeEsrTool(), {"fractions": [0.1, 0.8, 0.1], "linewidth": 3.0}
        )
        assert "not resolved" in text

    async def test_bad_frequency_range(self):
        text = await call_text(
            SynthesizeEsrTool(), {"fractions": [0.1, 0.8, 0.1], "f_min": 10.0, "f_max": 5.0}
        )
        assert "invalid probe sweep" in text

    async def test_estimate(self):
        spectrum = synthesize_esr_from_config(
            (0.2, 0.5, 0.3), SpinSystem(b_field=30.0), EsrConfig()
        )
        arguments = {
            "freq_mhz": spectrum.frequencies.tolist(),
            "amplitude": spectrum.amplitudes.tolist(),
            "b_field": 30.0,
        }
        payload = await call(EstimatePopulationsTool(), arguments)
        assert payload["fractions"] == pytest.approx([0.2, 0.5, 0.3], abs=1e-9)


class TestPresetTools:
    """Test the preset tools."""

    async def test_list(self):
        payload = await call(ListPresetsTool(), {})
        assert len(payload) == 9
        assert payload[0]["name"] == "fig1c"

    async def test_run(self, tmp_path):
        payload = await call(RunPresetTool(), {"name": "fig1c", "output_dir": str(tmp_path)})
        assert payload["final_fractions"] == pytest.approx([0.0, 1.0, 0.0])
        assert set(payload["estimates"]) == {"final", "rf_off"}
        assert (tmp_path / "manifest.json").is_file()

    async def test_unknown(self):
        text = await call_text(RunPresetTool(), {"name": "nope"})
        assert "unknown preset 'nope'" in text
