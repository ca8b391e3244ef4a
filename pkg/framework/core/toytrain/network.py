"""Toy architecture space and a hand-differentiated multilayer perceptron."""
import itertools
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple
import numpy as np
from framework.errors import InvalidInputError

MAX_DEPTH = 4
ACTIVATIONS = ('relu', 'tanh')


def relu(z):
    """Rectified linear unit."""
    return np.maximum(z, 0.0)


def relu_derivative(z, h):
    """Derivative of relu given its input z and output h."""
    return (z > 0.0).astype(z.dtype)


def tanh_derivative(z, h):
    """Derivative of tanh given its input z and output h."""
    return 1.0 - h * h


_ACTIVATION_FUNCTIONS = {
    'relu': (relu, relu_derivative),
    'tanh': (np.tanh, tanh_derivative)
}


def softmax_cross_entropy(logits, labels):
    """Compute the mean cross-entropy of softmax logits and its gradient.

    Parameters
    ----------
    logits: array of shape (n, classes), required
        The logits.
    labels: array of shape (n,), required
        The integer labels.

    Returns
    -------
    loss: float
        The mean cross-entropy.
    d_logits: array of shape (n, classes)
        The gradient of the loss with respect to the logits.
    """
    n = logits.shape[0]
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    sum_exp = exp.sum(axis=1, keepdims=True)
    log_probs = shifted - np.log(sum_exp)
    rows = np.arange(n)
    loss = -float(np.mean(log_probs[rows, labels]))
    d_logits = exp / sum_exp
    d_logits[rows, labels] -= 1.0
    return loss, d_logits / n


@dataclass(frozen=True)
class ToyArchSpec:
    """A multilayer perceptron of the toy search space.

    The activation is applied after every hidden layer.
    """

    hidden_widths: Tuple[int, ...]
    activation: str
    encoding: Tuple[int, ...] = ()

    def __post_init__(self):
        """Validate the architecture."""
        widths = tuple(int(w) for w in self.hidden_widths)
        if not 1 <= len(widths) <= MAX_DEPTH:
            raise InvalidInputError("depth must be in [1, {}], got {}".format(
                MAX_DEPTH, len(widths)))
        if any(w < 1 for w in widths):
            raise InvalidInputError("widths must be positive, got {}".format(
                widths))
        if self.activation not in ACTIVATIONS:
            raise InvalidInputError(
                "activation must be one of {}, got {}".format(
                    ", ".join(ACTIVATIONS), self.activation))
        object.__setattr__(self, 'hidden_widths', widths)
        object.__setattr__(self, 'encoding', tuple(self.encoding))

    @property
    def depth(self) -> int:
        """Get the number of hidden layers."""
        return len(self.hidden_widths)

    @property
    def arch_id(self) -> str:
        """Get the identifier of the architecture, e.g. `relu-16x8`."""
        return "{}-{}".format(self.activation,
                              "x".join(str(w) for w in self.hidden_widths))


def enumerate_toy_space(width_menu: Sequence[int], depth_range: Iterable[int],
                        activations: Iterable[str]) -> List[ToyArchSpec]:
    """Enumerate every architecture of a toy search space.

    Architectures are ordered by depth, then by the per-layer widths, then by
    activation, each following the sorted menus. The encoding of an
    architecture is the menu index of every layer's width followed by the
    index of its activation.

    Parameters
    ----------
    width_menu: sequence of int, required
        The widths a hidden layer can take.
    depth_range: iterable of int, required
        The numbers of hidden layers.
    activations: iterable of str, required
        The activations an architecture can use.

    Returns
    -------
    space: list of ToyArchSpec
        The architectures of the space.
    """
    widths = sorted(set(int(w) for w in width_menu))
    depths = sorted(set(int(d) for d in depth_range))
    activation_menu = sorted(set(activations))
    if not widths or not depths or not activation_menu:
        raise InvalidInputError(
            "width menu, depth range and activations must be non-empty")
    space = []
    for depth in depths:
        for layer_widths in itertools.product(widths, repeat=depth):
            for activation_index, activation in enumerate(activation_menu):
                encoding = tuple(widths.index(w) for w in layer_widths)
                space.append(
                    ToyArchSpec(hidden_widths=layer_widths,
                                activation=activation,
                                encoding=encoding + (activation_index, )))
    return space


class Mlp:
    """A multilayer perceptron trained by hand-written backpropagation.

    `parameters` alternates weight matrices and bias vectors, layer by layer;
    optimizers update them in place.
    """

    def __init__(self, arch: ToyArchSpec, input_dim: int, classes: int, rng):
        """Create a network with He-style uniform initialization.

        Parameters
        ----------
        arch: ToyArchSpec, required
            The architecture.
        input_dim: int, required
            The number of input features.
        classes: int, required
            The number of output classes.
        rng: numpy.random.Generator, required
            The generator used for the initial weights.
        """
        self.arch = arch
        self.input_dim = int(input_dim)
        self.classes = int(classes)
        self.__activation, self.__activation_derivative = \
            _ACTIVATION_FUNCTIONS[arch.activation]
        sizes = [self.input_dim] + list(arch.hidden_widths) + [self.classes]
        self.parameters = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            limit = np.sqrt(6.0 / fan_in)
            self.parameters.append(
                rng.uniform(-limit, limit, size=(fan_in, fan_out)))
            self.parameters.append(np.zeros(fan_out))

    @property
    def decay_mask(self) -> List[bool]:
        """Get whether weight decay applies to each parameter (weights only)."""
        return [index % 2 == 0 for index in range(len(self.parameters))]

    def forward(self, x):
        """Compute the logits of a batch."""
        h = x
        n_layers = len(self.parameters) // 2
        for layer in range(n_layers):
            z = h @ self.parameters[2 * layer] + self.parameters[2 * layer + 1]
            h = z if layer == n_layers - 1 else self.__activation(z)
        return h

    def loss(self, x, y) -> float:
        """Compute the mean cross-entropy of a batch."""
        return softmax_cross_entropy(self.forward(x), y)[0]

    def loss_and_gradients(self, x, y) -> Tuple[float, List[np.ndarray]]:
        """Compute the mean cross-entropy of a batch and its parameter gradients.

        Parameters
        ----------
        x: array of shape (n, input_dim), required
            The inputs.
        y: array of shape (n,), required
            The labels.

        Returns
        -------
        loss: float
            The mean cross-entropy.
        gradients: list of numpy.ndarray
            The gradients, aligned with `parameters`.
        """
        n_layers = len(self.parameters) // 2
        inputs, pre_activations, outputs = [], [], []
        h = x
        for layer in range(n_layers):
            inputs.append(h)
            z = h @ self.parameters[2 * layer] + self.parameters[2 * layer + 1]
            pre_activations.append(z)
            h = z if layer == n_layers - 1 else self.__activation(z)
            outputs.append(h)
        loss, delta = softmax_cross_entropy(h, y)

        gradients = [None] * len(self.parameters)
        for layer in reversed(range(n_layers)):
            if layer != n_layers - 1:
                delta = delta * self.__activation_derivative(
                    pre_activations[layer], outputs[layer])
            gradients[2 * layer] = inputs[layer].T @ delta
            gradients[2 * layer + 1] = delta.sum(axis=0)
            if layer > 0:
                delta = delta @ self.parameters[2 * layer].T
        return loss, gradients

    def evaluate(self, x, y) -> Tuple[float, float]:
        """Compute the mean cross-entropy and the accuracy on a dataset split."""
        logits = self.forward(x)
        loss, _ = softmax_cross_entropy(logits, y)
        accuracy = float(np.mean(np.argmax(logits, axis=1) == y))
        return loss, accuracy

    def copy_parameters(self) -> List[np.ndarray]:
        """Get a deep copy of the current parameters."""
        return [p.copy() for p in self.parameters]

    def set_parameters(self, parameters: Sequence[np.ndarray]):
        """Replace the current parameters with copies of the provided ones."""
        self.parameters = [np.array(p, dtype=np.float64) for p in parameters]
