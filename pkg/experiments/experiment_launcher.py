import os
from datetime import datetime
from io import StringIO
from itertools import product
from typing import List, Optional, Sequence

import pandas as pd

from dynrank.core.engine import Approach, EngineConfig
from dynrank.harness import ExperimentPlan, ExperimentRecord, run_experiment, summarize, write_csv


class BatchSweepLauncher:
    """
    Runs every engine on random graphs of several sizes for each batch composition
    and saves the results as:
        setup (insertions, deletions or mixed)
        \
         graph (n and m of the random graph)
              \
               records.csv, summary.csv
    A summary over all graphs of a setup is printed at the end.
    """

    def __init__(self, path_to_save: str, graph_sizes: Sequence[int], average_degree: int = 10,
                 fractions: Sequence[float] = (1e-5, 1e-4, 1e-3), repetitions: int = 5,
                 threads: Optional[int] = None, seed: int = 0):
        self.path_to_save = path_to_save
        self.graph_sizes = graph_sizes
        self.average_degree = average_degree
        self.fractions = fractions
        self.repetitions = repetitions
        self.threads = threads
        self.seed = seed

    def launch(self, setups: dict):
        """
        Launches the sweep for every named insertion ratio.
        :param setups: setup name mapped to the share of insertions in each batch
        """
        log = StringIO()
        for (setup_name, insert_ratio), num_nodes in product(setups.items(), self.graph_sizes):
            source = f'random:n={num_nodes},m={self.average_degree * num_nodes},seed={self.seed}'
            cur_path_to_save = os.path.join(self.path_to_save, setup_name, f'random_{num_nodes}')
            os.makedirs(cur_path_to_save, exist_ok=True)
            start_time = datetime.now()
            print(f'\n{setup_name} on {source} started at {start_time}', file=log)

            records = self._launch_experiment(source, insert_ratio)
            self._save_experiment_results(cur_path_to_save, records)

            print(f'finished, spent time: {datetime.now() - start_time}', file=log)
            print(summarize(records)[['approach', 'mode', 'fraction', 'elapsed_s', 'rank_updates', 'l1_error']]
                  .to_string(index=False), file=log)
        print(log.getvalue())

    def _launch_experiment(self, source: str, insert_ratio: float) -> List[ExperimentRecord]:
        plan = ExperimentPlan(graphs=[source], approaches=list(Approach), mode='both', fractions=self.fractions,
                              insert_ratio=insert_ratio, repetitions=self.repetitions, seed=self.seed,
                              threads=[self.threads], config=EngineConfig(threads=self.threads))
        return run_experiment(plan)

    @staticmethod
    def _save_experiment_results(path_to_save: str, records: List[ExperimentRecord]):
        write_csv(records, os.path.join(path_to_save, 'records.csv'))
        summarize(records).to_csv(os.path.join(path_to_save, 'summary.csv'), index=False)

    @staticmethod
    def load_results(path_to_load: str) -> pd.DataFrame:
        """ Collects the saved records of all setups into one frame """
        frames = []
        for root, _, files in os.walk(path_to_load):
            if 'records.csv' in files:
                frame = pd.read_csv(os.path.join(root, 'records.csv'))
                frame['setup'] = os.path.basename(os.path.dirname(root))
                frames.append(frame)
        return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()


if __name__ == '__main__':
    launcher = BatchSweepLauncher(path_to_save=os.path.join(os.getcwd(), 'batch_sweep'),
                                  graph_sizes=[10_000, 100_000], repetitions=3)
    launcher.launch(setups={'insertions': 1.0, 'deletions': 0.0, 'mixed': 0.8})
