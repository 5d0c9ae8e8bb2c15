"""Quick signal probe: 3-node kuramoto with one edge; does training separate
edge scores from non-edges?"""
import numpy as np, torch, time, json
torch.set_num_threads(1)
torch.manual_seed(0)
from reldiff.dataset import Adjacency
from reldiff.simulate import SimulationConfig, simulate_kuramoto
from reldiff.model import RelationalDiffusionModel, ModelConfig
from reldiff.training import TrainConfig, fit
from reldiff.dataset import split_dataset
from reldiff.inference import infer_scores, binarize, accuracy, auroc

edges = np.array([[0,1,0],[1,0,0],[0,0,0]], dtype=np.uint8)
adj = Adjacency(3, edges)
cfg = SimulationConfig(system="kuramoto", n_nodes=3, n_samples=260, seed=1, coupling_strength=1.0)
ds = simulate_kuramoto(adj, cfg)
train, val, test = split_dataset(ds, (200/260, 30/260, 30/260), seed=0)
model = RelationalDiffusionModel(3)
tc = TrainConfig(max_epochs=300, patience=4, val_interval=25, seed=0, lambda1=0.01, rho=None)
t0 = time.time()
res = fit(model, train, val, tc)
train_time = time.time() - t0
scores = infer_scores(res.model, test, n_repeats=2, seed=0)
pred = binarize(scores, adj.density, scope="global")
out = {
    "train_time_s": round(train_time, 1),
    "stopped_epoch": res.stopped_epoch,
    "best_val": res.best_val,
    "scores": scores.tolist(),
    "accuracy": accuracy(pred, adj.edges),
    "auroc": auroc(scores, adj.edges),
    "history_tail": res.history[-3:],
}
print(json.dumps(out, indent=1))
