"""
Forward-only feedforward network policies.

The flat parameter vector θ is laid out layer by layer; each layer stores
its weight matrix row-major (out_dim × in_dim) followed by its bias vector.
In the ``per_user`` structure θ is the concatenation of one such block per
user network, user 0 first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

try:
    from typing import override
except ImportError:  # Python < 3.12
    from typing_extensions import override

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import expit  # type: ignore

from .base_policy import PolicyBase


def _rectifier(z: NDArray[np.float64]) -> NDArray[np.float64]:
    # ties at exactly 0 give 0
    return np.where(z > 0, z, 0.0)


ACTIVATIONS: dict[str, Callable[[NDArray[np.float64]], NDArray[np.float64]]] = {
    "rectifier": _rectifier,
    "sigmoid": expit,
    "identity": lambda z: z,
}

STRUCTURES = ["per_user", "joint"]


@dataclass(frozen=True)
class LayerSpec:
    in_dim: int
    out_dim: int
    activation: str = "rectifier"

    def __post_init__(self) -> None:
        if self.in_dim <= 0 or self.out_dim <= 0:
            raise ValueError("Layer dimensions must be positive")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"Unknown activation: {self.activation}")

    @property
    def n_params(self) -> int:
        return self.in_dim * self.out_dim + self.out_dim


def build_layers(
    in_dim: int, hidden: Sequence[int], out_dim: int, output_activation: str = "sigmoid"
) -> list[LayerSpec]:
    """Rectifier hidden layers followed by one output layer."""
    dims = [in_dim, *hidden, out_dim]
    layers = [LayerSpec(dims[k], dims[k + 1], "rectifier") for k in range(len(dims) - 2)]
    layers.append(LayerSpec(dims[-2], dims[-1], output_activation))
    return layers


class DnnPolicy(PolicyBase):
    """Feedforward network policy φ(H, θ).

    Args:
        layers (Sequence[LayerSpec]): Layers of one network, in order.
        output_scale (float): Factor applied to the network output; with a
            sigmoid output layer the allocation lies in [0, output_scale].
        structure (str): ``"joint"`` (one multi-input network) or
            ``"per_user"`` (``n_users`` independent single-input networks,
            network i sees only h_i).
        n_users (int): Number of networks in the ``per_user`` structure.

    Raises:
        ValueError: If the layers do not chain, the structure is unknown, or a
            per-user network is not single-input single-output.
    """

    # ============================================================================
    # INITIALIZATION
    # ============================================================================

    def __init__(
        self,
        layers: Sequence[LayerSpec],
        output_scale: float = 1.0,
        structure: str = "joint",
        n_users: int = 1,
    ) -> None:
        if structure not in STRUCTURES:
            raise ValueError(f"Unknown structure: {structure}")
        if not output_scale > 0:
            raise ValueError("output_scale must be positive")
        for previous, current in zip(layers[:-1], layers[1:]):
            if previous.out_dim != current.in_dim:
                raise ValueError(
                    f"Layer output {previous.out_dim} does not match next input {current.in_dim}"
                )
        if structure == "per_user":
            if n_users < 1:
                raise ValueError("n_users must be at least 1")
            if layers and (layers[0].in_dim != 1 or layers[-1].out_dim != 1):
                raise ValueError("per_user networks must map one input to one output")
        self._layers = tuple(layers)
        self._output_scale = float(output_scale)
        self._structure = structure
        self._n_nets = n_users if structure == "per_user" else 1

    @classmethod
    def per_user(
        cls, n_users: int, hidden: Sequence[int] = (8, 4), output_scale: float = 20.0
    ) -> DnnPolicy:
        """One 1-hidden-…-1 network per user, sigmoid output scaled by ``output_scale``."""
        return cls(build_layers(1, hidden, 1), output_scale, "per_user", n_users)

    @classmethod
    def joint(
        cls, n_users: int, hidden: Sequence[int] = (32, 16), output_scale: float = 20.0
    ) -> DnnPolicy:
        """One network from all fading states to all allocations."""
        return cls(build_layers(n_users, hidden, n_users), output_scale, "joint")

    def __repr__(self) -> str:
        dims = [self._layers[0].in_dim] + [layer.out_dim for layer in self._layers] if self._layers else []
        return (
            f"{self.__class__.__name__}(structure={self._structure}, dims={dims}, "
            f"n_nets={self._n_nets}, theta_dim={self.get_theta_dim()})"
        )

    # ============================================================================
    # ACCESSORS
    # ============================================================================

    def get_layers(self) -> tuple[LayerSpec, ...]:
        return self._layers

    def get_structure(self) -> str:
        return self._structure

    def get_output_scale(self) -> float:
        return self._output_scale

    @override
    def get_theta_dim(self) -> int:
        return self._n_nets * sum(layer.n_params for layer in self._layers)

    @override
    def get_output_dim(self) -> int:
        if not self._layers:
            return self._n_nets
        if self._structure == "per_user":
            return self._n_nets
        return self._layers[-1].out_dim

    def get_input_dim(self) -> int:
        if self._structure == "per_user" or not self._layers:
            return self._n_nets
        return self._layers[0].in_dim

    # ============================================================================
    # FORWARD PASS
    # ============================================================================

    @override
    def forward(self, h: ArrayLike, theta: ArrayLike) -> NDArray[np.float64]:
        """Evaluate the allocation φ(h, θ).

        Args:
            h (ArrayLike): Fading state of shape (..., input_dim).
            theta (ArrayLike): Flat parameter vector of length ``theta_dim``.

        Raises:
            ValueError: If ``h`` or ``theta`` has the wrong dimension.

        Returns:
            NDArray[np.float64]: Allocation of shape (..., output_dim).
        """
        theta = self._check_theta(theta)
        h = np.asarray(h, dtype=np.float64)
        if h.ndim == 0 or h.shape[-1] != self.get_input_dim():
            raise ValueError(
                f"h must have trailing dimension {self.get_input_dim()}, got shape {h.shape}"
            )
        if not self._layers:
            return h.copy()
        if self._structure == "per_user":
            return self._forward_per_user(h, theta)
        return self._forward_joint(h, theta)

    def _forward_joint(
        self, h: NDArray[np.float64], theta: NDArray[np.float64]
    ) -> NDArray[np.float64]:
        activation = h
        offset = 0
        for layer in self._layers:
            n_weights = layer.in_dim * layer.out_dim
            weights = theta[offset : offset + n_weights].reshape(layer.out_dim, layer.in_dim)
            bias = theta[offset + n_weights : offset + layer.n_params]
            offset += layer.n_params
            activation = ACTIVATIONS[layer.activation](
                np.einsum("oi,...i->...o", weights, activation) + bias
            )
        return self._output_scale * activation

    def _forward_per_user(
        self, h: NDArray[np.float64], theta: NDArray[np.float64]
    ) -> NDArray[np.float64]:
        blocks = theta.reshape(self._n_nets, -1)
        activation = h[..., np.newaxis]
        offset = 0
        for layer in self._layers:
            n_weights = layer.in_dim * layer.out_dim
            weights = blocks[:, offset : offset + n_weights].reshape(
                self._n_nets, layer.out_dim, layer.in_dim
            )
            bias = blocks[:, offset + n_weights : offset + layer.n_params]
            offset += layer.n_params
            activation = ACTIVATIONS[layer.activation](
                np.einsum("noi,...ni->...no", weights, activation) + bias
            )
        return self._output_scale * activation[..., 0]


def forward(policy: PolicyBase, h: ArrayLike, theta: ArrayLike) -> NDArray[np.float64]:
    """Functional form of ``policy.forward(h, theta)``."""
    return policy.forward(h, theta)


def theta_dim(policy: PolicyBase) -> int:
    """Total parameter count N_φ of ``policy``."""
    return policy.get_theta_dim()
