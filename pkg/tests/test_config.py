"""Configuration loading: schema validation, defaults, and hashing."""

import pytest

from qfock.config import (
    DEFAULT_SEED,
    ConfigError,
    config_hash,
    load_config,
    normalize_config,
)


def minimal_raw():
    return {"space": {"q": [[0.3]], "blocks": ["fixed"]}}


def test_minimal_config_normalizes_with_defaults():
    config = normalize_config(minimal_raw())
    assert config.seed == DEFAULT_SEED
    assert config.n_max == 3
    assert config.dim == 1
    assert config.data["space"]["blocks"][0]["kind"] == "fixed"
    assert set(config.data["experiments"]) == {
        "moments",
        "modular",
        "multipliers",
        "ultra",
    }


def test_minimal_config_builds_a_space():
    config = normalize_config(minimal_raw())
    fock = config.fock()
    assert fock.n_max == 3
    assert fock.setup.dim == 1


def test_rotation_block_shorthand_and_mapping_agree():
    base = {
        "space": {
            "q": [[0.3, -0.2], [-0.2, 0.55]],
            "blocks": [{"kind": "rotation", "lam": 2.0}, {"kind": "fixed"}],
        }
    }
    config = normalize_config(base)
    blocks = config.data["space"]["blocks"]
    assert blocks[0] == {"kind": "rotation", "label": 0, "lam": 2.0}
    assert blocks[1] == {"kind": "fixed", "label": 1}


def test_deformation_bound_is_enforced():
    raw = {"space": {"q": [[1.0]], "blocks": ["fixed"]}}
    with pytest.raises(ConfigError, match=r"max\|q_ij\| < 1"):
        normalize_config(raw)


def test_size_budget_quotes_the_requested_cutoff():
    entries = [[0.5 if i == j else 0.0 for j in range(4)] for i in range(4)]
    raw = {
        "space": {"q": entries, "blocks": ["fixed"] * 4},
        "fock": {"n_max": 6},
    }
    with pytest.raises(ConfigError) as excinfo:
        normalize_config(raw)
    text = "\n".join(excinfo.value.violations)
    assert "4^6 = 4096" in text
    assert "beyond the level cap" in text


def test_unknown_keys_are_rejected():
    raw = minimal_raw()
    raw["mystery"] = 1
    raw["tolerances"] = {"nonsense": 1e-9}
    with pytest.raises(ConfigError) as excinfo:
        normalize_config(raw)
    text = "\n".join(excinfo.value.violations)
    assert "mystery" in text
    assert "nonsense" in text


def test_violations_are_consolidated():
    raw = {
        "space": {"q": [[0.3]], "blocks": ["fixed"]},
        "seed": -1,
        "fock": {"n_max": 0},
        "output_dir": "",
    }
    with pytest.raises(ConfigError) as excinfo:
        normalize_config(raw)
    assert len(excinfo.value.violations) >= 3


def test_parse_error_reports_line_and_column(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("space:\n  q: [[0.3]\n")
    with pytest.raises(ConfigError, match="parse error"):
        load_config(path)


def test_config_hash_ignores_the_output_directory():
    left = normalize_config({**minimal_raw(), "output_dir": "runs/a"})
    right = normalize_config({**minimal_raw(), "output_dir": "runs/b"})
    assert config_hash(left) == config_hash(right)

    reseeded = normalize_config({**minimal_raw(), "seed": 7})
    assert config_hash(left) != config_hash(reseeded)


def test_moment_words_default_to_short_basis_words():
    config = normalize_config(minimal_raw())
    words = config.experiment("moments")["words"]
    assert sorted(len(word["vectors"]) for word in words) == [2, 4]
    assert all(vec == [1.0] for word in words for vec in word["vectors"])


def test_ultra_defaults_are_self_consistent():
    config = normalize_config(minimal_raw())
    ultra = config.experiment("ultra")
    assert ultra["q"] == 0.5
    assert ultra["q_tilde"] == 0.6
    assert ultra["m_list"] == list(range(2, 11))
    assert len(ultra["vectors"]) == 4


def test_tolerance_scale_multiplies():
    config = normalize_config(minimal_raw())
    assert config.tolerance("moments", 10.0) == pytest.approx(
        10.0 * config.tolerance("moments")
    )
