from boundary_dimension.interval_partition import BranchMap
from boundary_dimension.management.base import ComputationCommand
from boundary_dimension.pressure import PressureStatus, pressure_curve, pressure_cylinder_bracket


class Command(ComputationCommand):
    help = 'Pressure curve P(t) with certified brackets over a grid of t'
    subcommand = 'pressure'

    def run(self, config):
        partition = self.partition(config)
        ts = self.t_grid(config, 'pressure', 0.4, 1.2, 0.05)
        samples = pressure_curve(partition, ts, config.threads)
        rows = [dict(sample.as_row(), infinite=sample.status == PressureStatus.INFINITE)
                for sample in samples]
        writer = self.writer
        writer.write_csv('pressure.csv', rows)

        orders = config.get('pressure.orders', [])
        if orders:
            branch_map = BranchMap(partition)
            alphabet = config.integer('pressure.alphabet', None, minimum=2)
            cylinder_rows = []
            for index, order in enumerate(orders):
                order = config.integer(f'pressure.orders.{index}', minimum=1)
                for t in ts:
                    sample = pressure_cylinder_bracket(branch_map, float(t), order, alphabet, config.threads)
                    cylinder_rows.append(dict(sample.as_row(), order=order))
            writer.write_csv('pressure_cylinders.csv', cylinder_rows)
        infinite = sum(row['infinite'] for row in rows)
        return f'{partition.generator}: {len(rows)} values of t, {infinite} with infinite pressure'
