"""The full conditional diffusion model: denoiser + edge predictor + schedule.

Holds the per-step plumbing shared by training and inference: assembling the
three input channels, corrupting target entries, sampling edges from the
current noisy state, and running the reverse chain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .denoiser import DenoiserConfig, DenoiserNet
from .diffusion import DiffusionSchedule, build_schedule
from .edges import EdgePredictor, EdgeState


@dataclass(frozen=True)
class ModelConfig:
    denoiser: DenoiserConfig = DenoiserConfig()
    hidden_units: int = 64
    tau: float = 0.5
    squared_logits: bool = True
    n_diffusion_steps: int = 50
    beta_start: float = 0.0001
    beta_end: float = 0.5
    schedule_kind: str = "quadratic"

    def to_dict(self) -> dict:
        from dataclasses import asdict

        return asdict(self)

    @staticmethod
    def from_dict(payload: dict) -> "ModelConfig":
        payload = dict(payload)
        payload["denoiser"] = DenoiserConfig(**payload["denoiser"])
        return ModelConfig(**payload)


class RelationalDiffusionModel(nn.Module):
    def __init__(self, n_nodes: int, config: ModelConfig = ModelConfig()):
        super().__init__()
        self.n_nodes = n_nodes
        self.config = config
        self.schedule: DiffusionSchedule = build_schedule(
            config.n_diffusion_steps,
            config.beta_start,
            config.beta_end,
            config.schedule_kind,
        )
        self.denoiser = DenoiserNet(n_nodes, config.n_diffusion_steps, config.denoiser)
        self.edge_predictor = EdgePredictor(
            n_nodes,
            hidden_units=config.hidden_units,
            tau=config.tau,
            squared_logits=config.squared_logits,
        )

    # -- shared plumbing ---------------------------------------------------

    def corrupt_targets(
        self,
        values: torch.Tensor,
        target_mask: torch.Tensor,
        t: torch.Tensor,
        eps: torch.Tensor,
    ) -> torch.Tensor:
        """Forward-corrupt target entries only; everything else untouched."""
        abar = torch.as_tensor(
            self.schedule.alpha_cum, device=values.device, dtype=values.dtype
        )[t.long() - 1][:, None, None]
        noisy = abar.sqrt() * values + (1.0 - abar).sqrt() * eps
        return values * (1 - target_mask) + noisy * target_mask

    def sample_edges(
        self, cond_values: torch.Tensor, noisy_values: torch.Tensor,
        target: torch.Tensor, rng: np.random.Generator
    ) -> EdgeState:
        """Edge module input is the merged noisy state (conditional data plus
        the corrupted target entries)."""
        x_forw = cond_values + noisy_values
        return self.edge_predictor(x_forw, target, rng)

    def predict_noise(
        self,
        cond_values: torch.Tensor,
        noisy_values: torch.Tensor,
        cond_mask: torch.Tensor,
        edge_vector: torch.Tensor,
        target: torch.Tensor,
        t: torch.Tensor,
    ) -> torch.Tensor:
        return self.denoiser(
            cond_values, noisy_values, cond_mask, edge_vector, target, t
        )

    # -- training loss -----------------------------------------------------

    def loss_terms(
        self,
        values: torch.Tensor,
        cond_mask: torch.Tensor,
        target_mask: torch.Tensor,
        target: torch.Tensor,
        t: torch.Tensor,
        eps: torch.Tensor,
        rho: float,
        rng: np.random.Generator,
    ) -> tuple[torch.Tensor, torch.Tensor, EdgeState]:
        """(denoise term, regularization term, edge state) for one batch.

        The denoise term is the per-item mean squared error between true and
        predicted noise over target entries, averaged over items with a
        non-empty target.  The regularization term is the per-item absolute
        gap between mean noiseless edge-existence probability and rho.
        """
        x_t = self.corrupt_targets(values, target_mask, t, eps)
        cond_values = values * cond_mask
        noisy_values = x_t * target_mask
        edge_state = self.sample_edges(cond_values, noisy_values, target, rng)
        eps_hat = self.predict_noise(
            cond_values, noisy_values, cond_mask, edge_state.edge_vector, target, t
        )
        residual = (eps - eps_hat) * target_mask
        per_item_count = target_mask.sum(dim=(1, 2))
        usable = per_item_count > 0
        per_item_sq = residual.pow(2).sum(dim=(1, 2))
        denoise = (
            per_item_sq[usable] / per_item_count[usable]
        ).mean() if bool(usable.any()) else torch.zeros((), device=values.device)
        reg = (edge_state.existence.mean(dim=1) - rho).abs().mean()
        return denoise, reg, edge_state

    # -- reverse-chain imputation -------------------------------------------

    @torch.no_grad()
    def reverse_impute(
        self,
        values: torch.Tensor,
        cond_mask: torch.Tensor,
        target_mask: torch.Tensor,
        target: torch.Tensor,
        rng: np.random.Generator,
        collect_edges: bool = False,
    ) -> tuple[torch.Tensor, torch.Tensor | None]:
        """Run the full T-step reverse chain on target entries.

        Returns the imputed values at target positions (merged with the
        conditional data elsewhere) and, optionally, the per-item sum of
        sampled edge-existence bits over reverse steps, shape (B, K).
        """
        b, k, length = values.shape
        device = values.device
        cond_values = values * cond_mask
        current = torch.as_tensor(
            rng.standard_normal((b, k, length)), dtype=values.dtype, device=device
        ) * target_mask
        edge_counts = (
            torch.zeros(b, k, device=device) if collect_edges else None
        )
        schedule = self.schedule
        for t_step in range(schedule.n_steps, 0, -1):
            noisy_values = current * target_mask
            edge_state = self.sample_edges(cond_values, noisy_values, target, rng)
            if edge_counts is not None:
                edge_counts += edge_state.edge_vector
            t_vec = torch.full((b,), t_step, dtype=torch.long, device=device)
            eps_hat = self.predict_noise(
                cond_values,
                noisy_values,
                cond_mask,
                edge_state.edge_vector,
                target,
                t_vec,
            )
            i = t_step - 1
            beta = float(schedule.beta[i])
            abar = float(schedule.alpha_cum[i])
            current = (current - (beta / (1.0 - abar) ** 0.5) * eps_hat) / (
                (1.0 - beta) ** 0.5
            )
            if t_step > 1:
                z = torch.as_tensor(
                    rng.standard_normal((b, k, length)),
                    dtype=values.dtype,
                    device=device,
                )
                current = current + float(schedule.sigma[i]) * z
            current = current * target_mask
        imputed = cond_values + current * target_mask
        return imputed, edge_counts
