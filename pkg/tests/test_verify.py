import numpy as np
import pytest

from thetanorm.verify import densify_batch, random_batch, run_suite, verify_identities


def test_identities_pass():
    items = verify_identities(seed=7, samples=300)
    ids = [it.id for it in items]
    assert ids == sorted(ids)
    assert {"i01-reduced-equals-direct", "i02-alternation", "i03-cocycle", "i04-factor-swap",
            "i05-rotation", "i06-reflection"} <= set(ids)
    assert all(it.passed for it in items), [it for it in items if not it.passed]


def test_identities_n2():
    assert all(it.passed for it in verify_identities(seed=1, samples=200, n=2))


def test_identities_reject_zero_samples():
    with pytest.raises(ValueError):
        verify_identities(samples=0)


def test_random_batch_shape_and_density():
    b = random_batch(3, 20, np.random.default_rng(0))
    assert b.shape == (20, 3, 7)
    for row in b.reshape(-1, 7):
        assert set(row.tolist()) == set(range(1, row.max() + 1))
    # odd rows are all-distinct
    assert (b[1::2].max(axis=-1) == 7).all()


def test_densify_batch():
    raw = np.array([[[5, 0, 5, 2]]])
    assert densify_batch(raw).tolist() == [[[3, 1, 3, 2]]]


def test_suite_report_is_deterministic():
    a = run_suite("identities", seed=3, samples=100)
    b = run_suite("identities", seed=3, samples=100)
    assert [it.to_dict() for it in a["items"]] == [it.to_dict() for it in b["items"]]
    assert a["failed"] == 0


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope")
