import copy
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vmaflab.errors import SchemaError
from vmaflab.features import FEATURE_NAMES, FeatureVector
from vmaflab.model import (MODEL_VERSION, dump_model, model_from_dict, normalize_features,
                           parse_model, raw_to_score, score_clip_pair, score_features, svr_predict)

import oracles
from conftest import luma_clip


def tiny_model(**over):
    d = {
        "version": MODEL_VERSION,
        "feature_names": list(FEATURE_NAMES),
        "norm": [{"slope": 1.0, "intercept": 0.0, "clip_low": None, "clip_high": None}] * 6,
        "gamma": 0.5,
        "bias": 0.25,
        "support_vectors": [[1, 1, 1, 1, 1, 0], [0, 0, 0, 0, 0, 0]],
        "dual_coefs": [0.5, -0.25],
        "score_slope": 0.01,
        "score_intercept": 0.0,
        "score_clip": [0, 100],
        "score_transform": None,
    }
    d.update(over)
    return d


@pytest.mark.parametrize("change, msg", [
    ({"version": "vmaflab-svr/0"}, "unsupported model version"),
    ({"feature_names": list(FEATURE_NAMES[:5]) + ["adm"]}, "unknown feature"),
    ({"dual_coefs": [0.5]}, "dual coefficients"),
    ({"support_vectors": [[1, 2, 3]]}, "columns"),
    ({"gamma": 0.0}, "gamma"),
    ({"norm": [{"slope": 1.0, "intercept": 0.0}] * 5}, "norm entries"),
    ({"score_clip": [100, 0]}, "score_clip"),
    ({"norm": [{"intercept": 0.0}] * 6}, "malformed"),
])
def test_schema_errors(change, msg):
    with pytest.raises(SchemaError, match=msg):
        model_from_dict(tiny_model(**change))


def test_missing_field_and_bad_json(tmp_path):
    d = tiny_model()
    del d["bias"]
    with pytest.raises(SchemaError, match="bias"):
        model_from_dict(d)
    p = tmp_path / "m.json"
    p.write_text("{not json")
    with pytest.raises(SchemaError):
        parse_model(p)


def test_normalization_examples():
    norms = [{"slope": 1.0, "intercept": 0.0, "clip_low": None, "clip_high": None},
             {"slope": 2.0, "intercept": -1.0, "clip_low": None, "clip_high": None},
             {"slope": 1.0, "intercept": 0.3, "clip_low": None, "clip_high": 1.0},
             {"slope": 1.0, "intercept": -2.0, "clip_low": -0.5, "clip_high": None},
             {"slope": 1.0, "intercept": 0.0, "clip_low": None, "clip_high": None},
             {"slope": 0.1, "intercept": 0.0, "clip_low": None, "clip_high": None}]
    m = model_from_dict(tiny_model(norm=norms))
    x = normalize_features(FeatureVector(0.7, 0.75, 1.0, 1.0, 0.9, 5.0), m)
    np.testing.assert_allclose(x, [0.7, 0.5, 1.0, -0.5, 0.9, 0.5])


def test_feature_order_follows_model():
    names = list(reversed(FEATURE_NAMES))
    m = model_from_dict(tiny_model(feature_names=names))
    x = normalize_features(FeatureVector(0.1, 0.2, 0.3, 0.4, 0.5, 6.0), m)
    np.testing.assert_array_equal(x, [6.0, 0.5, 0.4, 0.3, 0.2, 0.1])


@pytest.mark.parametrize("seed", range(100))
def test_svr_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    n_sv = int(rng.integers(1, 30))
    sv = rng.uniform(-1, 1, (n_sv, 6))
    coefs = rng.normal(0, 1, n_sv)
    gamma, bias = float(rng.uniform(0.01, 2)), float(rng.normal())
    m = model_from_dict(tiny_model(support_vectors=sv.tolist(), dual_coefs=coefs.tolist(), gamma=gamma, bias=bias))
    x = rng.uniform(-1.5, 1.5, 6)
    want = oracles.svr(x.tolist(), sv.tolist(), coefs.tolist(), gamma, bias)
    assert svr_predict(x, m) == pytest.approx(want, abs=1e-12)


def test_score_denormalization_and_clamp():
    m = model_from_dict(tiny_model(score_slope=0.01, score_intercept=0.1))
    assert raw_to_score(0.6, m) == pytest.approx(50.0)
    assert raw_to_score(5.0, m) == 100.0
    assert raw_to_score(-5.0, m) == 0.0
    m2 = model_from_dict(tiny_model(score_transform={"a": 2.0, "b": -10.0}))
    assert raw_to_score(0.3, m2) == pytest.approx(50.0)


@settings(max_examples=50, deadline=None)
@given(values=st.lists(st.floats(-2, 40, allow_nan=False), min_size=6, max_size=6))
def test_scores_always_in_clip_range(values):
    m = model_from_dict(tiny_model(bias=3.0))
    (fs,) = score_features([FeatureVector(*values)], m)
    assert 0.0 <= fs.score <= 100.0


def test_round_trip(tmp_path):
    d = tiny_model(score_transform={"a": 1.5, "b": 2.0}, description="hand-made")
    m = model_from_dict(d)
    p = tmp_path / "m.json"
    dump_model(m, p)
    again = json.loads(p.read_text())
    assert again == json.loads(json.dumps(d))
    m2 = parse_model(p)
    x = np.linspace(-1, 1, 6)
    assert svr_predict(x, m2) == svr_predict(x, m)


def test_bundled_model_round_trip(tmp_path):
    m = parse_model()
    p = tmp_path / "b.json"
    dump_model(m, p)
    assert parse_model(p).to_dict() == m.to_dict()
    assert m.n_features == 6


def test_bundled_model_identity_is_high(textured):
    clip = luma_clip([textured, np.roll(textured, 1, axis=1)])
    assert score_clip_pair(clip, clip, parse_model()).pooled >= 95.0


def test_model_is_not_mutable():
    m = model_from_dict(copy.deepcopy(tiny_model()))
    with pytest.raises(ValueError):
        m.support_vectors[0, 0] = 3.0
