import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='EnumerationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('family', models.CharField(max_length=32)),
                ('n_min', models.PositiveSmallIntegerField()),
                ('n_max', models.PositiveSmallIntegerField()),
                ('seed', models.BigIntegerField(default=0)),
                ('trials', models.PositiveSmallIntegerField(default=3)),
                ('created', models.DateTimeField(auto_now_add=True)),
                ('models_count', models.PositiveIntegerField(default=0)),
                ('identifiable_count', models.PositiveIntegerField(default=0)),
                ('unidentifiable_count', models.PositiveIntegerField(default=0)),
                ('rule_covered_count', models.PositiveIntegerField(default=0)),
                ('disagreement_count', models.PositiveIntegerField(default=0)),
            ],
            options={
                'ordering': ('-created',),
            },
        ),
        migrations.CreateModel(
            name='ClassifiedModel',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('sequence', models.PositiveIntegerField(default=0)),
                ('model_hash', models.CharField(db_index=True, max_length=16)),
                ('n', models.PositiveSmallIntegerField()),
                ('edges', models.TextField(blank=True)),
                ('inputs', models.CharField(max_length=64)),
                ('outputs', models.CharField(max_length=64)),
                ('leaks', models.CharField(blank=True, max_length=64)),
                ('rank', models.PositiveIntegerField()),
                ('kernel_dim', models.PositiveIntegerField()),
                ('verdict', models.CharField(choices=[('locally-identifiable', 'locally identifiable (global status undetermined)'), ('unidentifiable', 'unidentifiable')], max_length=32)),
                ('rule_hits', models.TextField(blank=True)),
                ('agreement', models.BooleanField()),
                ('run', models.ForeignKey(blank=True, null=True, on_delete=django.db.models.deletion.CASCADE, related_name='rows', to='identifiability.enumerationrun')),
            ],
            options={
                'ordering': ('run', 'sequence'),
                'constraints': [models.UniqueConstraint(fields=('run', 'sequence'), name='unique_row_per_run')],
            },
        ),
    ]
