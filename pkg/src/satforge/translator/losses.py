"""CGAN loss math: adversarial terms (least-squares or cross-entropy),
feature matching over discriminator activations, and L1 reconstruction.

Conventions:
  least_squares  scores are raw linear outputs; real target 1, fake 0
  cross_entropy  scores are probabilities in (0, 1) (the training loop
                 applies a sigmoid before calling in); a discriminator
                 that outputs 0.5 everywhere costs exactly 2*ln(2)

Discriminator outputs are nested lists: per scale, a list of feature maps
whose last entry is the patch score map. A bare tensor is treated as a
single scale with no intermediate features.
"""

from __future__ import annotations

import torch

from satforge.errors import ShapeMismatch

_EPS = 1e-12


def _normalize(outputs):
    """-> list of scales, each a list of tensors ending with the score map."""
    if torch.is_tensor(outputs):
        return [[outputs]]
    if outputs and torch.is_tensor(outputs[0]):
        return [list(outputs)]
    return [list(scale) for scale in outputs]


def _score_loss(score: torch.Tensor, target_real: bool, form: str) -> torch.Tensor:
    if form == "least_squares":
        target = 1.0 if target_real else 0.0
        return torch.mean((score - target) ** 2)
    if form == "cross_entropy":
        p = torch.clamp(score, _EPS, 1.0 - _EPS)
        return -torch.mean(torch.log(p) if target_real else torch.log(1.0 - p))
    raise ValueError(f"unknown adversarial_loss_form {form!r}")


def adversarial_d_loss(real_outputs, fake_outputs, form: str) -> torch.Tensor:
    """Discriminator loss: real scored as real plus fake scored as fake,
    averaged over scales within each term."""
    real = _normalize(real_outputs)
    fake = _normalize(fake_outputs)
    loss_real = sum(_score_loss(s[-1], True, form) for s in real) / len(real)
    loss_fake = sum(_score_loss(s[-1], False, form) for s in fake) / len(fake)
    return loss_real + loss_fake


def adversarial_g_loss(fake_outputs, form: str) -> torch.Tensor:
    fake = _normalize(fake_outputs)
    return sum(_score_loss(s[-1], True, form) for s in fake) / len(fake)


def feature_matching_loss(real_outputs, fake_outputs) -> torch.Tensor:
    """Mean L1 distance between real and fake discriminator activations,
    averaged over layers and scales (the score map is excluded)."""
    real = _normalize(real_outputs)
    fake = _normalize(fake_outputs)
    terms = []
    for rs, fs in zip(real, fake):
        for rf, ff in zip(rs[:-1], fs[:-1]):
            terms.append(torch.mean(torch.abs(ff - rf.detach())))
    if not terms:
        return torch.zeros(())
    return sum(terms) / len(terms)


def cgan_losses(real_pair, fake_pair, d_outputs: dict, config) -> dict:
    """Itemized CGAN objective.

    real_pair/fake_pair are (feature, image) tensors; d_outputs carries
    "real" and "fake" discriminator outputs (fake evaluated with gradients
    flowing to the generator). Returns generator_loss, discriminator_loss
    and the components they decompose into.
    """
    feat_r, img_r = real_pair
    feat_f, img_f = fake_pair
    if img_r.shape != img_f.shape or feat_r.shape != feat_f.shape:
        raise ShapeMismatch(
            f"real {tuple(img_r.shape)}/{tuple(feat_r.shape)} vs fake {tuple(img_f.shape)}/{tuple(feat_f.shape)}"
        )

    form = config.adversarial_loss_form
    d_loss = adversarial_d_loss(d_outputs["real"], d_outputs["fake"], form)
    g_adv = adversarial_g_loss(d_outputs["fake"], form)
    g_fm = feature_matching_loss(d_outputs["real"], d_outputs["fake"])
    g_l1 = torch.mean(torch.abs(img_f - img_r))
    g_loss = g_adv + config.feature_matching_weight * g_fm + config.l1_weight * g_l1

    return {
        "generator_loss": g_loss,
        "discriminator_loss": d_loss,
        "components": {
            "g_adv": g_adv,
            "g_fm": g_fm,
            "g_l1": g_l1,
            "fm_weight": config.feature_matching_weight,
            "l1_weight": config.l1_weight,
        },
    }
