"""Edge prediction: map the current (noisy) multivariate state and a target
node to per-pair edge probabilities and discrete straight-through samples.

Pipeline: a shared 1D conv block embeds each series, a learned positional
table is added, target/other embeddings are concatenated per pair and pushed
through an MLP + linear head to a 2-logit row (existence, non-existence).
Sampling squares the logits before adding Gumbel noise, exactly as the score
form prescribes; set ``squared_logits=False`` for the conventional variant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .errors import InvalidConfigError


@dataclass
class EdgeState:
    """Per-batch-item edge quantities for one target node each."""

    logits: torch.Tensor  # (B, K-1, 2)
    probs: torch.Tensor  # (B, K-1, 2) noisy relaxed probabilities
    samples: torch.Tensor  # (B, K-1, 2) straight-through one-hot
    edge_vector: torch.Tensor  # (B, K) existence bits, self entry 1
    existence: torch.Tensor  # (B, K-1) noiseless existence probabilities
    target_node: torch.Tensor  # (B,)


def others_index(n_nodes: int, target: torch.Tensor) -> torch.Tensor:
    """(B, K-1) node indices ascending, skipping each item's target node."""
    b = target.shape[0]
    all_idx = torch.arange(n_nodes, device=target.device).expand(b, n_nodes)
    keep = all_idx != target[:, None]
    return all_idx[keep].view(b, n_nodes - 1)


def gumbel_edge_sample(
    logits: torch.Tensor,
    tau: float,
    rng: np.random.Generator,
    squared: bool = True,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Relaxed probabilities and straight-through one-hot samples.

    probs = softmax((score + eta) / tau) with eta ~ Gumbel(0, 1) and
    score = logits**2 (or raw logits).  The hard sample equals
    one_hot(argmax probs) in the forward pass while gradients follow probs.
    """
    if tau <= 0:
        raise InvalidConfigError("tau must be positive")
    score = logits**2 if squared else logits
    eta = torch.as_tensor(
        rng.gumbel(size=tuple(score.shape)), dtype=score.dtype, device=score.device
    )
    probs = torch.softmax((score + eta) / tau, dim=-1)
    index = probs.argmax(dim=-1, keepdim=True)
    hard = torch.zeros_like(probs).scatter_(-1, index, 1.0)
    # (probs - probs.detach()) is exactly zero elementwise, so the forward
    # value stays exactly one-hot while gradients follow the relaxation
    samples = hard + (probs - probs.detach())
    return probs, samples


class EdgePredictor(nn.Module):
    def __init__(
        self,
        n_nodes: int,
        hidden_units: int = 64,
        tau: float = 0.5,
        squared_logits: bool = True,
        conv_kernel: int = 5,
        conv_stride: int = 2,
    ):
        super().__init__()
        if tau <= 0:
            raise InvalidConfigError("tau must be positive")
        self.n_nodes = n_nodes
        self.hidden_units = hidden_units
        self.tau = tau
        self.squared_logits = squared_logits
        self.conv = nn.Conv1d(1, hidden_units, kernel_size=conv_kernel, stride=conv_stride)
        self.positional = nn.Parameter(torch.randn(n_nodes, hidden_units) * 0.1)
        self.pair_mlp = nn.Sequential(
            nn.Linear(2 * hidden_units, hidden_units),
            nn.ReLU(),
            nn.Linear(hidden_units, hidden_units),
            nn.ReLU(),
        )
        self.head = nn.Linear(hidden_units, 2)

    def embed_nodes(self, x_forw: torch.Tensor) -> torch.Tensor:
        """(B, K, L) -> (B, K, H): shared conv features pooled over time, plus
        the positional table."""
        b, k, length = x_forw.shape
        if k != self.n_nodes:
            raise InvalidConfigError(
                f"input has {k} nodes but positional table holds {self.n_nodes}"
            )
        feats = torch.relu(self.conv(x_forw.reshape(b * k, 1, length)))
        feats = feats.mean(dim=-1).view(b, k, self.hidden_units)
        return feats + self.positional

    def edge_logits(self, h_emb: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
        """(B, K, H), (B,) -> (B, K-1, 2), rows ordered by ascending node
        index skipping the target."""
        b, k, h = h_emb.shape
        others = others_index(k, target)
        h_target = h_emb.gather(1, target[:, None, None].expand(b, 1, h))
        h_target = h_target.expand(b, k - 1, h)
        h_other = h_emb.gather(1, others[:, :, None].expand(b, k - 1, h))
        pair = torch.cat([h_target, h_other], dim=-1)
        return self.head(self.pair_mlp(pair))

    def existence_probs(self, logits: torch.Tensor) -> torch.Tensor:
        """Noiseless softmax(score / tau) existence component, (B, K-1)."""
        score = logits**2 if self.squared_logits else logits
        return torch.softmax(score / self.tau, dim=-1)[..., 0]

    def forward(
        self, x_forw: torch.Tensor, target: torch.Tensor, rng: np.random.Generator
    ) -> EdgeState:
        b, k, _ = x_forw.shape
        h_emb = self.embed_nodes(x_forw)
        logits = self.edge_logits(h_emb, target)
        probs, samples = gumbel_edge_sample(logits, self.tau, rng, self.squared_logits)
        others = others_index(k, target)
        edge_vector = torch.ones(b, k, dtype=samples.dtype, device=samples.device)
        edge_vector = edge_vector.scatter(1, others, samples[..., 0])
        return EdgeState(
            logits=logits,
            probs=probs,
            samples=samples,
            edge_vector=edge_vector,
            existence=self.existence_probs(logits),
            target_node=target,
        )
