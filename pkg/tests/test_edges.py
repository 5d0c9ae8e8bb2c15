import math

import numpy as np
import pytest
import torch

from reldiff.edges import EdgePredictor, gumbel_edge_sample, others_index
from reldiff.errors import InvalidConfigError


def _predictor(k=5, h=64, **kw):
    torch.manual_seed(0)
    return EdgePredictor(k, hidden_units=h, **kw)


def test_embedding_shape():
    pred = _predictor()
    x = torch.randn(2, 5, 100)
    emb = pred.embed_nodes(x)
    assert emb.shape == (2, 5, 64)


def test_zero_input_and_weights_leave_positional_table():
    pred = _predictor()
    with torch.no_grad():
        pred.conv.weight.zero_()
        pred.conv.bias.zero_()
    emb = pred.embed_nodes(torch.zeros(3, 5, 40))
    expected = pred.positional.detach().expand(3, 5, 64)
    assert torch.equal(emb, expected)


def test_row_swap_moves_conv_features_not_positional_terms():
    pred = _predictor()
    x = torch.randn(1, 5, 64)
    swapped = x.clone()
    swapped[:, [1, 3]] = x[:, [3, 1]]
    base = pred.embed_nodes(x) - pred.positional
    perm = pred.embed_nodes(swapped) - pred.positional
    expected = base.clone()
    expected[:, [1, 3]] = base[:, [3, 1]]
    assert torch.allclose(perm, expected, atol=1e-6)


def test_node_count_mismatch_rejected():
    pred = _predictor(k=5)
    with pytest.raises(InvalidConfigError):
        pred.embed_nodes(torch.randn(1, 6, 30))


def test_two_nodes_produce_single_logit_row():
    pred = _predictor(k=2)
    emb = pred.embed_nodes(torch.randn(3, 2, 20))
    logits = pred.edge_logits(emb, torch.zeros(3, dtype=torch.long))
    assert logits.shape == (3, 1, 2)


def test_identical_embeddings_give_identical_rows():
    pred = _predictor()
    emb = torch.randn(1, 5, 64)
    emb[0, 2] = emb[0, 4]
    logits = pred.edge_logits(emb, torch.zeros(1, dtype=torch.long))
    # rows are ordered ascending skipping the target (0): nodes 1,2,3,4
    assert torch.allclose(logits[0, 1], logits[0, 3], atol=1e-6)


def test_logits_match_recomposed_layer_algebra():
    pred = _predictor(k=4, h=8)
    emb = torch.randn(2, 4, 8)
    target = torch.tensor([1, 3])
    logits = pred.edge_logits(emb, target)
    for b in range(2):
        others = [i for i in range(4) if i != int(target[b])]
        for row, i in enumerate(others):
            pair = torch.cat([emb[b, target[b]], emb[b, i]])
            expected = pred.head(pred.pair_mlp(pair))
            assert torch.allclose(logits[b, row], expected, atol=1e-6)


def test_others_index_orders_ascending_skipping_target():
    idx = others_index(5, torch.tensor([0, 2, 4]))
    assert idx.tolist() == [[1, 2, 3, 4], [0, 1, 3, 4], [0, 1, 2, 3]]


def test_gumbel_probs_normalized_and_samples_one_hot():
    rng = np.random.default_rng(0)
    logits = torch.randn(64, 4, 2, dtype=torch.float64)
    probs, samples = gumbel_edge_sample(logits, tau=0.5, rng=rng)
    assert torch.allclose(probs.sum(-1), torch.ones(64, 4, dtype=torch.float64), atol=1e-6)
    hard = samples.detach()
    assert ((hard == 0) | (hard == 1)).all()
    assert torch.equal(hard.sum(-1), torch.ones(64, 4, dtype=torch.float64))


def test_equal_logits_sample_existence_half_the_time():
    rng = np.random.default_rng(1)
    logits = torch.full((10_000, 1, 2), 0.7)
    _, samples = gumbel_edge_sample(logits, tau=0.5, rng=rng)
    rate = samples[..., 0].mean().item()
    assert abs(rate - 0.5) < 0.02


def test_saturated_gap_sampled_deterministically():
    # squared-logit gap / tau > 20: the larger squared logit wins >= 99%
    rng = np.random.default_rng(2)
    logits = torch.tensor([[[4.0, 0.5]]]).expand(5000, 1, 2)
    _, samples = gumbel_edge_sample(logits, tau=0.5, rng=rng)
    assert samples[..., 0].mean().item() >= 0.99


def test_tau_must_be_positive():
    rng = np.random.default_rng(0)
    with pytest.raises(InvalidConfigError):
        gumbel_edge_sample(torch.randn(1, 1, 2), tau=0.0, rng=rng)
    with pytest.raises(InvalidConfigError):
        EdgePredictor(3, tau=-1.0)


def test_existence_probability_closed_form():
    pred = _predictor(k=5, tau=1.0)
    logits = torch.tensor([[[2.0, 0.0]]])
    prob = pred.existence_probs(logits)
    expected = math.exp(4.0) / (math.exp(4.0) + 1.0)
    assert prob.item() == pytest.approx(expected, rel=1e-6)


def test_equal_logits_existence_half():
    pred = _predictor(k=5)
    logits = torch.full((1, 4, 2), 0.3)
    assert torch.allclose(pred.existence_probs(logits), torch.full((1, 4), 0.5))


def test_forward_state_shapes_and_self_entry():
    pred = _predictor()
    rng = np.random.default_rng(3)
    x = torch.randn(6, 5, 80)
    target = torch.tensor([0, 1, 2, 3, 4, 2])
    state = pred(x, target, rng)
    assert state.logits.shape == (6, 4, 2)
    assert state.edge_vector.shape == (6, 5)
    for b in range(6):
        assert state.edge_vector[b, target[b]] == 1.0


def test_edge_vector_matches_existence_samples():
    pred = _predictor()
    rng = np.random.default_rng(4)
    x = torch.randn(3, 5, 60)
    target = torch.tensor([1, 1, 4])
    state = pred(x, target, rng)
    others = others_index(5, target)
    gathered = state.edge_vector.gather(1, others)
    assert torch.equal(gathered.detach(), state.samples[..., 0].detach())


def test_straight_through_gradient_matches_probs_path():
    # with saturated logits the hard sample equals the soft relaxation, so a
    # finite-difference probe of the soft loss matches the straight-through
    # gradient of the hard loss within 1e-3 relative error
    torch.manual_seed(0)
    base = torch.tensor([[[3.0, 0.2], [0.1, 2.5]]], dtype=torch.float64)
    weights = torch.randn(2, 2, dtype=torch.float64)

    def soft_loss(logits, eta):
        probs = torch.softmax((logits**2 + eta) / 0.5, dim=-1)
        return (probs * weights).sum()

    def hard_loss(logits, eta):
        probs = torch.softmax((logits**2 + eta) / 0.5, dim=-1)
        index = probs.argmax(dim=-1, keepdim=True)
        hard = torch.zeros_like(probs).scatter_(-1, index, 1.0)
        samples = hard + probs - probs.detach()
        return (samples * weights).sum()

    eta = torch.tensor(np.random.default_rng(0).gumbel(size=(1, 2, 2)))
    logits = base.clone().requires_grad_(True)
    hard_loss(logits, eta).backward()
    st_grad = logits.grad.clone()
    assert st_grad.abs().max() > 0

    step = 1e-4
    for idx in np.ndindex(1, 2, 2):
        plus = base.clone()
        plus[idx] += step
        minus = base.clone()
        minus[idx] -= step
        fd = (soft_loss(plus, eta) - soft_loss(minus, eta)).item() / (2 * step)
        rel = abs(fd - st_grad[idx].item()) / max(abs(fd), 1e-9)
        assert rel < 1e-3


def test_determinism_given_seed():
    x = torch.randn(4, 5, 50)
    target = torch.tensor([0, 1, 2, 3])
    pred = _predictor()
    a = pred(x, target, np.random.default_rng(9))
    b = pred(x, target, np.random.default_rng(9))
    assert torch.equal(a.samples, b.samples)
    assert torch.equal(a.probs, b.probs)


def test_plain_logit_variant():
    rng = np.random.default_rng(5)
    logits = torch.tensor([[[-5.0, 5.0]]]).expand(2000, 1, 2)
    _, samples = gumbel_edge_sample(logits, tau=0.5, rng=rng, squared=False)
    # plain form distinguishes sign: second class dominates
    assert samples[..., 1].mean().item() >= 0.99
    rng = np.random.default_rng(6)
    _, samples_sq = gumbel_edge_sample(logits, tau=0.5, rng=rng, squared=True)
    # squared form is sign-invariant: equal scores, ~50/50
    assert abs(samples_sq[..., 0].mean().item() - 0.5) < 0.05
