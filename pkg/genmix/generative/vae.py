import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from genmix.exceptions import ConfigurationError, NumericError
from genmix.generative.checkpoint import decode_container, encode_container
from genmix.generative.models import GenerativeModel
from genmix.generative.schemas import ModelKind, VaeConfig
from genmix.nn.codec import decode_params, encode_params
from genmix.nn.models import AdamState, Gradients, MlpParams
from genmix.nn.network import backward, forward, init_params
from genmix.nn.optim import adam_step
from genmix.nn.schemas import AdamConfig, MlpSpec

LOGVAR_CLAMP: float = 10.0


@dataclass
class ElboLoss:
    """
    Результат вычисления отрицательного ELBO на батче.

    Attributes:
        loss: recon + kl
        recon: Средний NLL реконструкции
        kl: Средний KL(q(z|x) || N(0, I))
        encoder_grads: Градиенты энкодера
        decoder_grads: Градиенты декодера
    """

    loss: float
    recon: float
    kl: float
    encoder_grads: Gradients
    decoder_grads: Gradients


class GaussianVae(GenerativeModel):
    """
    VAE с гауссовским энкодером (mean, log-variance) и гауссовским декодером
    фиксированной дисперсии, априорное распределение N(0, I).
    """

    kind = ModelKind.GAUSSIAN_VAE

    def __init__(
        self,
        encoder_spec: MlpSpec,
        encoder: MlpParams,
        decoder_spec: MlpSpec,
        decoder: MlpParams,
        obs_variance: float = 1.0,
        optimizer: AdamConfig = AdamConfig(),
        batch_size: int = 32,
    ) -> None:
        if encoder_spec.d_out != 2 * decoder_spec.d_in:
            raise ConfigurationError(
                f"encoder output {encoder_spec.d_out} must be twice the latent dim {decoder_spec.d_in}"
            )
        if encoder_spec.d_in != decoder_spec.d_out:
            raise ConfigurationError("encoder input and decoder output dims differ")
        if obs_variance <= 0:
            raise ConfigurationError(f"obs_variance must be > 0, got {obs_variance}")
        self.encoder_spec = encoder_spec
        self.encoder = encoder
        self.decoder_spec = decoder_spec
        self.decoder = decoder
        self.obs_variance = obs_variance
        self.optimizer = optimizer
        self.batch_size = batch_size
        self.reset_optimizer()

    @classmethod
    def create(
        cls,
        d: int,
        config: VaeConfig,
        rng: np.random.Generator,
        optimizer: AdamConfig = AdamConfig(),
        batch_size: int = 32,
    ) -> "GaussianVae":
        encoder_spec: MlpSpec = MlpSpec.build(d, list(config.hidden_widths), 2 * config.latent_dim, config.activation)
        decoder_spec: MlpSpec = MlpSpec.build(config.latent_dim, list(config.hidden_widths), d, config.activation)
        return cls(
            encoder_spec,
            init_params(encoder_spec, rng),
            decoder_spec,
            init_params(decoder_spec, rng),
            obs_variance=config.obs_variance,
            optimizer=optimizer,
            batch_size=batch_size,
        )

    @property
    def dim(self) -> int:
        return self.decoder_spec.d_out

    @property
    def latent_dim(self) -> int:
        return self.decoder_spec.d_in

    def reset_optimizer(self) -> None:
        self.encoder_state = AdamState.zeros_like(self.encoder, self.optimizer)
        self.decoder_state = AdamState.zeros_like(self.decoder, self.optimizer)

    def train_epoch(self, subset: np.ndarray, rng: np.random.Generator) -> float:
        n: int = len(subset)
        if n == 0:
            raise ConfigurationError("cannot train on an empty subset")
        order: np.ndarray = rng.permutation(n)
        total: float = 0.0
        for start in range(0, n, self.batch_size):
            batch: np.ndarray = subset[order[start:start + self.batch_size]]
            result: ElboLoss = elbo_loss(self, batch, rng=rng)
            adam_step(self.encoder, result.encoder_grads, self.encoder_state)
            adam_step(self.decoder, result.decoder_grads, self.decoder_state)
            total += result.loss * len(batch)
        return total / n

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        # decoder mean only, no observation noise
        z: np.ndarray = rng.standard_normal((n, self.latent_dim))
        out, _ = forward(self.decoder_spec, self.decoder, z)
        return out

    def checkpoint(self) -> bytes:
        meta: bytes = json.dumps({"obs_variance": self.obs_variance}).encode("ascii")
        return encode_container(
            self.kind.value,
            {
                "encoder": encode_params(self.encoder_spec, self.encoder),
                "decoder": encode_params(self.decoder_spec, self.decoder),
                "meta": meta,
            },
        )

    def restore(self, blob: bytes) -> None:
        kind, entries = decode_container(blob)
        if kind != self.kind.value:
            raise ConfigurationError(f"cannot restore {kind!r} checkpoint into {self.kind.value!r}")
        self.encoder_spec, self.encoder = decode_params(entries["encoder"])
        self.decoder_spec, self.decoder = decode_params(entries["decoder"])
        self.obs_variance = float(json.loads(entries["meta"])["obs_variance"])
        self.reset_optimizer()

    @classmethod
    def from_checkpoint(cls, blob: bytes, optimizer: AdamConfig = AdamConfig(), batch_size: int = 32) -> "GaussianVae":
        _, entries = decode_container(blob)
        encoder_spec, encoder = decode_params(entries["encoder"])
        decoder_spec, decoder = decode_params(entries["decoder"])
        obs_variance: float = float(json.loads(entries["meta"])["obs_variance"])
        return cls(encoder_spec, encoder, decoder_spec, decoder, obs_variance, optimizer, batch_size)


def elbo_loss(
    vae: GaussianVae,
    batch: np.ndarray,
    rng: Optional[np.random.Generator] = None,
    noise: Optional[np.ndarray] = None,
) -> ElboLoss:
    """
    Отрицательный ELBO с репараметризацией (один сэмпл шума на точку).

    loss = mean_i [ ||x_i - dec(z_i)||^2 / (2 sigma^2) + d/2 log(2 pi sigma^2) + KL(q(z|x_i) || N(0, I)) ],
    z_i = mu_i + exp(logvar_i / 2) * eps_i.

    Args:
        vae: Модель
        batch: Непустой батч B x d
        rng: Источник шума eps (если noise не задан)
        noise: Зафиксированный шум B x z (для проверки градиентов)

    Returns:
        ElboLoss: Значения слагаемых и градиенты

    Raises:
        NumericError: Нечисловое значение recon или kl (term указывает слагаемое)
    """
    batch = np.asarray(batch, dtype=np.float64)
    n: int = len(batch)
    if n == 0:
        raise ConfigurationError("elbo_loss needs a nonempty batch")
    z_dim: int = vae.latent_dim
    var: float = vae.obs_variance

    h, enc_tape = forward(vae.encoder_spec, vae.encoder, batch)
    mu: np.ndarray = h[:, :z_dim]
    raw_logvar: np.ndarray = h[:, z_dim:]
    logvar: np.ndarray = np.clip(raw_logvar, -LOGVAR_CLAMP, LOGVAR_CLAMP)
    std: np.ndarray = np.exp(0.5 * logvar)
    if noise is None:
        if rng is None:
            raise ConfigurationError("elbo_loss needs either rng or noise")
        noise = rng.standard_normal((n, z_dim))
    z: np.ndarray = mu + std * noise

    mean, dec_tape = forward(vae.decoder_spec, vae.decoder, z)
    diff: np.ndarray = batch - mean
    recon_per: np.ndarray = 0.5 * np.sum(diff * diff, axis=1) / var + 0.5 * vae.dim * np.log(2.0 * np.pi * var)
    kl_per: np.ndarray = np.maximum(0.5 * np.sum(mu * mu + np.expm1(logvar) - logvar, axis=1), 0.0)
    recon: float = float(np.mean(recon_per))
    kl: float = float(np.mean(kl_per))
    if not np.isfinite(recon):
        raise NumericError("non-finite reconstruction term", term="recon")
    if not np.isfinite(kl):
        raise NumericError("non-finite KL term", term="kl")

    decoder_grads: Gradients = backward(vae.decoder_spec, vae.decoder, dec_tape, -diff / (var * n))
    dz: np.ndarray = decoder_grads.inputs
    dmu: np.ndarray = dz + mu / n
    dlogvar: np.ndarray = dz * noise * 0.5 * std + 0.5 * np.expm1(logvar) / n
    dlogvar = np.where(np.abs(raw_logvar) <= LOGVAR_CLAMP, dlogvar, 0.0)
    encoder_grads: Gradients = backward(
        vae.encoder_spec, vae.encoder, enc_tape, np.concatenate([dmu, dlogvar], axis=1)
    )
    return ElboLoss(
        loss=recon + kl,
        recon=recon,
        kl=kl,
        encoder_grads=encoder_grads,
        decoder_grads=decoder_grads,
    )
