"""A toy differentiable cell made of mixed operations, with hand-written gradients.

The cell maps an input batch to a stem node `phi_0 = x @ W_stem`, then every
intermediate node j = 1..J sums the mixed operations applied to all its
predecessors::

    phi_j = sum_{i < j} sum_o softmax(alpha_(i,j))_o * o(phi_i)

The cell output is the sum of the intermediate nodes, followed by a linear
classifier. Every operation of the menu maps the hidden width to itself.
"""
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple
import numpy as np
from scipy.special import softmax
from framework.core.toytrain.network import softmax_cross_entropy
from framework.errors import InvalidInputError
from framework.errors import NumericalError

OPERATIONS = ('zero', 'identity', 'linear', 'linear_relu')
PARAMETRIC_OPERATIONS = ('linear', 'linear_relu')
DEFAULT_MENU = OPERATIONS

Edge = Tuple[int, int]


def cell_edges(nodes: int) -> List[Edge]:
    """Get the edges (i, j), i < j, of a cell with `nodes` intermediate nodes.

    Node 0 is the stem; edges are ordered by target node, then by source.
    """
    if nodes < 1:
        raise InvalidInputError("a cell needs at least one node, got {}".format(
            nodes))
    return [(i, j) for j in range(1, nodes + 1) for i in range(j)]


def check_menu(menu: Sequence[str]) -> Tuple[str, ...]:
    """Validate an operation menu."""
    menu = tuple(menu)
    if len(menu) == 0:
        raise InvalidInputError("the operation menu is empty")
    unknown = [op for op in menu if op not in OPERATIONS]
    if unknown or len(set(menu)) != len(menu):
        raise InvalidInputError(
            "menu must hold distinct operations among {}, got {}".format(
                ", ".join(OPERATIONS), ", ".join(menu)))
    return menu


def weight_name(edge: Edge, op: str) -> str:
    """Get the key of the weight matrix of a parametric operation on an edge."""
    return "edge{}-{}/{}".format(edge[0], edge[1], op)


def _init_weights(edge_ops, edges, hidden, input_dim, classes, rng):
    """Create He-style uniform weights for the stem, the edges and the classifier."""
    def uniform(fan_in, fan_out):
        limit = np.sqrt(6.0 / fan_in)
        return rng.uniform(-limit, limit, size=(fan_in, fan_out))

    weights = {'stem': uniform(input_dim, hidden)}
    for edge, ops in zip(edges, edge_ops):
        for op in ops:
            if op in PARAMETRIC_OPERATIONS:
                weights[weight_name(edge, op)] = uniform(hidden, hidden)
    weights['classifier'] = uniform(hidden, classes)
    weights['classifier_bias'] = np.zeros(classes)
    return weights


def _apply(op, weights, edge, phi):
    """Apply one operation; returns its output and its pre-activation, if any."""
    if op == 'zero':
        return np.zeros_like(phi), None
    if op == 'identity':
        return phi, None
    z = phi @ weights[weight_name(edge, op)]
    if op == 'linear':
        return z, None
    return np.maximum(z, 0.0), z


def _forward(weights, edges, edge_ops, mixing, x):
    """Run the cell forward, keeping what the backward pass needs."""
    nodes = edges[-1][1]
    phis = [x @ weights['stem']]
    cache = {}
    for j in range(1, nodes + 1):
        phi = np.zeros_like(phis[0])
        for e, edge in enumerate(edges):
            if edge[1] != j:
                continue
            outputs = []
            for o, op in enumerate(edge_ops[e]):
                out, z = _apply(op, weights, edge, phis[edge[0]])
                outputs.append((out, z))
                phi = phi + mixing[e][o] * out
            cache[e] = outputs
        phis.append(phi)
    hidden = np.sum(phis[1:], axis=0)
    logits = hidden @ weights['classifier'] + weights['classifier_bias']
    return logits, (x, phis, hidden, cache)


def _backward(weights, edges, edge_ops, mixing, state, d_logits):
    """Back-propagate the logit gradient to the weights and the mixing weights."""
    x, phis, hidden, cache = state
    grads = {name: np.zeros_like(value) for name, value in weights.items()}
    grads['classifier'] = hidden.T @ d_logits
    grads['classifier_bias'] = d_logits.sum(axis=0)
    d_hidden = d_logits @ weights['classifier'].T
    d_phis = [np.zeros_like(phis[0])] + [d_hidden.copy() for _ in phis[1:]]
    d_mixing = [np.zeros(len(ops)) for ops in edge_ops]

    for e in reversed(range(len(edges))):
        i, j = edges[e]
        g = d_phis[j]
        for o, op in enumerate(edge_ops[e]):
            out, z = cache[e][o]
            d_mixing[e][o] = float(np.sum(g * out))
            if op == 'zero':
                continue
            if op == 'identity':
                d_phis[i] += mixing[e][o] * g
                continue
            name = weight_name(edges[e], op)
            d_z = g if op == 'linear' else g * (z > 0.0)
            grads[name] += mixing[e][o] * (phis[i].T @ d_z)
            d_phis[i] += mixing[e][o] * (d_z @ weights[name].T)
    grads['stem'] = x.T @ d_phis[0]
    return grads, d_mixing


def _check_finite(loss, arrays):
    if not np.isfinite(loss) or not all(np.all(np.isfinite(a)) for a in arrays):
        raise NumericalError("non-finite value in the cell's loss or gradients")


class ToyCell:
    """A supernetwork whose every edge mixes the whole operation menu.

    `alphas` has one row per edge, in `edges` order, and one column per menu
    operation; `weights` maps names to the operation weights w.
    """

    def __init__(self,
                 input_dim: int,
                 classes: int,
                 rng,
                 nodes: int = 3,
                 hidden: int = 8,
                 menu: Sequence[str] = DEFAULT_MENU):
        """Create a cell with random weights and near-uniform alphas.

        Parameters
        ----------
        input_dim: int, required
            The number of input features.
        classes: int, required
            The number of classes.
        rng: numpy.random.Generator, required
            The generator of the initial weights and alphas.
        nodes: int, optional
            The number J of intermediate nodes.
        hidden: int, optional
            The width of every node.
        menu: sequence of str, optional
            The operations mixed on every edge; see `OPERATIONS`.
        """
        if hidden < 1:
            raise InvalidInputError("hidden must be positive, got {}".format(hidden))
        self.menu = check_menu(menu)
        self.nodes = int(nodes)
        self.edges = cell_edges(self.nodes)
        self.__edge_ops = [self.menu] * len(self.edges)
        self.weights: Dict[str, np.ndarray] = _init_weights(
            self.__edge_ops, self.edges, hidden, input_dim, classes, rng)
        self.alphas = 1e-3 * rng.standard_normal(
            (len(self.edges), len(self.menu)))

    def mixing_weights(self) -> np.ndarray:
        """Get the softmax of every edge's alphas."""
        if not np.all(np.isfinite(self.alphas)):
            raise NumericalError("non-finite architecture parameters")
        return softmax(self.alphas, axis=1)

    def forward(self, x) -> np.ndarray:
        """Compute the logits of a batch."""
        return _forward(self.weights, self.edges, self.__edge_ops,
                        self.mixing_weights(), x)[0]

    def loss(self, x, y) -> float:
        """Compute the mean cross-entropy of a batch."""
        return softmax_cross_entropy(self.forward(x), y)[0]

    def loss_and_gradients(self, x, y):
        """Compute the loss of a batch and its gradients in w and in alpha.

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
        weight_gradients: dict of str to numpy.ndarray
            The gradients, keyed like `weights`.
        alpha_gradient: numpy.ndarray
            The gradient with respect to `alphas`.
        """
        mixing = self.mixing_weights()
        logits, state = _forward(self.weights, self.edges, self.__edge_ops,
                                 mixing, x)
        loss, d_logits = softmax_cross_entropy(logits, y)
        grads, d_mixing = _backward(self.weights, self.edges, self.__edge_ops,
                                    mixing, state, d_logits)
        d_mixing = np.array(d_mixing)
        alpha_gradient = mixing * (
            d_mixing - np.sum(mixing * d_mixing, axis=1, keepdims=True))
        _check_finite(loss, list(grads.values()) + [alpha_gradient])
        return loss, grads, alpha_gradient

    def evaluate(self, x, y) -> Tuple[float, float]:
        """Compute the mean cross-entropy and the accuracy on a dataset split."""
        logits = self.forward(x)
        loss, _ = softmax_cross_entropy(logits, y)
        return loss, float(np.mean(np.argmax(logits, axis=1) == y))

    def update_weights(self, gradients: Dict[str, np.ndarray], lr: float):
        """Descend the weight gradients in place."""
        for name, gradient in gradients.items():
            self.weights[name] -= lr * gradient

    def update_alphas(self, gradient: np.ndarray, lr: float):
        """Descend an alpha gradient in place."""
        self.alphas = self.alphas - lr * gradient


def mixed_op_forward(cell: ToyCell, stem: np.ndarray) -> List[np.ndarray]:
    """Compute the node activations of a cell from its stem activation.

    Parameters
    ----------
    cell: ToyCell, required
        The cell.
    stem: array of shape (n, hidden), required
        The activation of node 0.

    Returns
    -------
    nodes: list of numpy.ndarray
        The activations of nodes 0..J; node j is the softmax-weighted sum of
        every menu operation applied to every predecessor.
    """
    mixing = cell.mixing_weights()
    phis = [np.asarray(stem, dtype=np.float64)]
    for j in range(1, cell.nodes + 1):
        phi = np.zeros_like(phis[0])
        for e, edge in enumerate(cell.edges):
            if edge[1] != j:
                continue
            for o, op in enumerate(cell.menu):
                phi = phi + mixing[e][o] * _apply(op, cell.weights, edge,
                                                  phis[edge[0]])[0]
        if not np.all(np.isfinite(phi)):
            raise NumericalError("non-finite activation at node {}".format(j))
        phis.append(phi)
    return phis


@dataclass(frozen=True)
class DerivedCell:
    """A discrete cell: one operation per edge."""

    nodes: int
    menu: Tuple[str, ...]
    encoding: Tuple[int, ...]

    @property
    def edges(self) -> List[Edge]:
        """Get the edges of the cell."""
        return cell_edges(self.nodes)

    @property
    def operations(self) -> Tuple[str, ...]:
        """Get the operation of every edge."""
        return tuple(self.menu[index] for index in self.encoding)

    @property
    def arch_id(self) -> str:
        """Get the identifier of the cell, e.g. `linear|identity|zero`."""
        return "|".join(self.operations)


def derive_architecture(alphas: np.ndarray, menu: Sequence[str]) -> DerivedCell:
    """Select the operation with the largest alpha on every edge.

    Ties go to the lowest menu index.

    Parameters
    ----------
    alphas: array of shape (edges, len(menu)), required
        The architecture parameters.
    menu: sequence of str, required
        The operation menu.

    Returns
    -------
    cell: DerivedCell
        The discrete cell.
    """
    alphas = np.asarray(alphas, dtype=np.float64)
    menu = check_menu(menu)
    if alphas.ndim != 2 or alphas.shape[1] != len(menu):
        raise InvalidInputError(
            "alphas must have shape (edges, {}), got {}".format(
                len(menu), alphas.shape))
    if not np.all(np.isfinite(alphas)):
        raise InvalidInputError("alphas must be finite")
    nodes = 0
    while nodes * (nodes + 1) // 2 < alphas.shape[0]:
        nodes += 1
    if nodes * (nodes + 1) // 2 != alphas.shape[0]:
        raise InvalidInputError(
            "{} edges do not form a cell".format(alphas.shape[0]))
    encoding = tuple(int(index) for index in np.argmax(alphas, axis=1))
    return DerivedCell(nodes=nodes, menu=menu, encoding=encoding)


class DerivedCellNetwork:
    """A trainable network built from a derived cell.

    `parameters` lists the weights by name in sorted order, which lets the
    toy SGD trainer retrain the cell from scratch.
    """

    def __init__(self, cell: DerivedCell, input_dim: int, classes: int, rng,
                 hidden: int = 8):
        """Create the network with He-style uniform initialization."""
        self.cell = cell
        self.input_dim = int(input_dim)
        self.edges = cell.edges
        self.__edge_ops = [(op, ) for op in cell.operations]
        self.__mixing = [np.ones(1) for _ in self.edges]
        weights = _init_weights(self.__edge_ops, self.edges, hidden,
                                input_dim, classes, rng)
        self.names = sorted(weights)
        self.parameters = [weights[name] for name in self.names]

    @property
    def decay_mask(self) -> List[bool]:
        """Get whether weight decay applies to each parameter (weights only)."""
        return [not name.endswith('bias') for name in self.names]

    def __weights(self):
        return dict(zip(self.names, self.parameters))

    def forward(self, x):
        """Compute the logits of a batch."""
        return _forward(self.__weights(), self.edges, self.__edge_ops,
                        self.__mixing, x)[0]

    def loss_and_gradients(self, x, y) -> Tuple[float, List[np.ndarray]]:
        """Compute the loss of a batch and the gradients aligned with `parameters`."""
        weights = self.__weights()
        logits, state = _forward(weights, self.edges, self.__edge_ops,
                                 self.__mixing, x)
        loss, d_logits = softmax_cross_entropy(logits, y)
        grads, _ = _backward(weights, self.edges, self.__edge_ops,
                             self.__mixing, state, d_logits)
        return loss, [grads[name] for name in self.names]

    def evaluate(self, x, y) -> Tuple[float, float]:
        """Compute the mean cross-entropy and the accuracy on a dataset split."""
        logits = self.forward(x)
        loss, _ = softmax_cross_entropy(logits, y)
        return loss, float(np.mean(np.argmax(logits, axis=1) == y))
