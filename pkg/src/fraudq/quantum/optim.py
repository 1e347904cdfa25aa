"""First-order adaptive-moment optimizer shared by the variational trainers."""

import numpy as np


class Adam:
    """Bias-corrected adaptive-moment gradient descent on a flat vector."""

    def __init__(self, n_params, learning_rate=0.01, beta1=0.9, beta2=0.999, eps=1e-8):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.first = np.zeros(n_params)
        self.second = np.zeros(n_params)
        self.steps = 0

    def step(self, params, grad):
        """One descent update; returns the new parameter vector."""
        self.steps += 1
        self.first = self.beta1 * self.first + (1.0 - self.beta1) * grad
        self.second = self.beta2 * self.second + (1.0 - self.beta2) * grad * grad
        first_hat = self.first / (1.0 - self.beta1 ** self.steps)
        second_hat = self.second / (1.0 - self.beta2 ** self.steps)
        return params - self.learning_rate * first_hat / (np.sqrt(second_hat) + self.eps)
