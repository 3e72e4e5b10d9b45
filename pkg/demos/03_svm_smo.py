"""
A kernel SVM trained with SMO
=============================

XOR cannot be separated by a line but an RBF kernel handles it. The trained
model exposes its support vectors, dual coefficients and bias.
"""

import numpy as np

from cadpipe.svm import SvmConfig, decision_function, predict, train

X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=float)
y = np.array([False, True, True, False])

linear = train(X, y, SvmConfig(kernel="linear", C=10.0))
rbf = train(X, y, SvmConfig(kernel="rbf", gamma=1.0, C=10.0))

print("linear accuracy:", np.mean(predict(linear, X) == y))
print("rbf accuracy:   ", np.mean(predict(rbf, X) == y))
print("rbf decision values:", np.round(decision_function(rbf, X), 4))
print("alphas:", np.round(rbf.alphas, 4), "bias:", round(rbf.bias, 4))
