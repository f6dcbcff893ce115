"""
Token features and the linear SVM
=================================

Trains the hinge-loss SVM on the bundled labeled corpus, reports
5-fold cross-validation metrics, and inspects the most discriminative
tokens the model picked up.
"""

import numpy as np

from snipscan import classifier as clf
from snipscan.synth import labeled_corpus

corpus = labeled_corpus()
labels = [1 if lbl == "insecure" else -1 for _, _, lbl in corpus]
print(f"corpus: {len(corpus)} snippets "
      f"({labels.count(1)} insecure, {labels.count(-1)} secure)")

# Comment removal is the only preprocessing; tokens are identifier runs
# plus individual punctuation characters, weighted tf-idf, L2-normalized.
docs = [clf.tokenize(code, sid) for sid, code, _ in corpus]
vocab = clf.fit_vocabulary(docs)
samples = [clf.vectorize(d, vocab) for d in docs]
print(f"vocabulary: {len(vocab)} tokens")

ts = clf.TrainingSet(samples=samples, labels=labels)
cv = clf.cross_validate(ts, k=5, C=0.644, seed=0, epochs=30)
print(f"\n5-fold CV at C=0.644: accuracy={cv['mean_accuracy']:.3f} "
      f"precision={cv['mean_precision']:.3f} recall={cv['mean_recall']:.3f}")
for i, fold in enumerate(cv["folds"]):
    print(f"  fold {i}: tn={fold.tn} fp={fold.fp} fn={fold.fn} tp={fold.tp} "
          f"acc={fold.accuracy:.3f}")

model = clf.train(ts, C=0.644, epochs=30, seed=0, vocabulary=vocab)
tokens = sorted(vocab.index, key=vocab.index.get)
order = np.argsort(model.w)
print("\nstrongest insecure-leaning tokens:")
for i in order[-8:][::-1]:
    print(f"  {tokens[i]:<28} w={model.w[i]:+.3f}")
print("strongest secure-leaning tokens:")
for i in order[:8]:
    print(f"  {tokens[i]:<28} w={model.w[i]:+.3f}")
