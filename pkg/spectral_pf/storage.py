"""
Ledger of verification runs in SQLite.
One row per run with its counts, one row per check.
"""

from datetime import datetime
from typing import List, Optional
import logging

from sqlalchemy import create_engine, Column, ForeignKey, Integer, String, Text, DateTime
from sqlalchemy.ext.declarative import declarative_base
from sqlalchemy.orm import sessionmaker, Session
from sqlalchemy.pool import StaticPool

from spectral_pf.schema import CheckResult, RunSummary, VerificationReport

logger = logging.getLogger(__name__)

Base = declarative_base()


class VerificationRun(Base):
    """Model for one run of the acceptance suite."""

    __tablename__ = "verification_runs"

    id = Column(Integer, primary_key=True, autoincrement=True)
    started_at = Column(DateTime, default=datetime.utcnow, index=True)
    order = Column(Integer, nullable=False)
    passed = Column(Integer, default=0)
    failed = Column(Integer, default=0)
    flagged = Column(Integer, default=0)
    status = Column(String(20), nullable=False, index=True)  # ok, failed


class CheckRecord(Base):
    """Model for a single check within a run."""

    __tablename__ = "check_records"

    id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(Integer, ForeignKey("verification_runs.id"), nullable=False, index=True)
    group = Column(String(50), nullable=False, index=True)
    name = Column(String(255), nullable=False)
    status = Column(String(10), nullable=False, index=True)  # pass, fail, flag
    detail = Column(Text, default="")


class Database:
    """Engine and session factory of the run ledger."""

    def __init__(self, db_url: str):
        """
        Open the ledger, creating its tables if needed.

        Args:
            db_url: SQLAlchemy database URL
        """
        if db_url.endswith(":memory:"):
            # One shared connection, otherwise each session sees an empty database.
            self.engine = create_engine(db_url, poolclass=StaticPool,
                                        connect_args={"check_same_thread": False})
        else:
            self.engine = create_engine(db_url)
        self.SessionLocal = sessionmaker(bind=self.engine)
        Base.metadata.create_all(bind=self.engine)
        logger.info(f"Ledger opened at {db_url}")

    def get_session(self) -> Session:
        return self.SessionLocal()


# Global ledger (opened by the CLI)
_db: Optional[Database] = None


def init_db(db_url: str) -> Database:
    """Open the global ledger at ``db_url``."""
    global _db
    _db = Database(db_url)
    return _db


def get_db() -> Database:
    """Get the global ledger."""
    if _db is None:
        raise RuntimeError("Database not initialized. Call init_db() first.")
    return _db


def _summary(run: VerificationRun, checks: Optional[List[CheckResult]] = None) -> RunSummary:
    return RunSummary(
        id=run.id,
        started_at=run.started_at,
        order=run.order,
        passed=run.passed,
        failed=run.failed,
        flagged=run.flagged,
        status=run.status,
        checks=checks,
    )


def _check(record: CheckRecord) -> CheckResult:
    return CheckResult(group=record.group, name=record.name, status=record.status,
                       detail=record.detail or "")


def save_run(report: VerificationReport) -> int:
    """
    Save a verification report with all its checks.

    Args:
        report: Finished verification report

    Returns:
        Run ID
    """
    db = get_db()
    with db.get_session() as session:
        run = VerificationRun(
            started_at=report.started_at,
            order=report.order,
            passed=report.passed,
            failed=report.failed,
            flagged=report.flagged,
            status="ok" if report.ok else "failed",
        )
        session.add(run)
        session.flush()
        for check in report.checks:
            session.add(CheckRecord(run_id=run.id, group=check.group, name=check.name,
                                    status=check.status, detail=check.detail))
        session.commit()
        logger.info(f"Saved verification run {run.id} with {len(report.checks)} checks")
        return run.id


def get_checks(run_id: int) -> List[CheckResult]:
    """Checks of one run in the order they were recorded."""
    db = get_db()
    with db.get_session() as session:
        records = session.query(CheckRecord).filter(
            CheckRecord.run_id == run_id
        ).order_by(CheckRecord.id).all()
        return [_check(record) for record in records]


def get_run(run_id: int) -> Optional[RunSummary]:
    """
    Retrieve a run and its checks.

    Args:
        run_id: Run ID

    Returns:
        RunSummary or None
    """
    db = get_db()
    with db.get_session() as session:
        run = session.query(VerificationRun).filter(VerificationRun.id == run_id).first()
        if run is None:
            return None
        summary = _summary(run)
    return summary.model_copy(update={"checks": get_checks(run_id)})


def list_runs(limit: int = 20) -> List[RunSummary]:
    """
    Most recent runs first, without their checks.

    Args:
        limit: Maximum number of runs to retrieve
    """
    db = get_db()
    with db.get_session() as session:
        runs = session.query(VerificationRun).order_by(
            VerificationRun.id.desc()
        ).limit(limit).all()
        return [_summary(run) for run in runs]


def get_failed_checks(limit: int = 50) -> List[CheckRecord]:
    """
    Failed checks across all runs, newest first.

    Args:
        limit: Maximum number of records to retrieve

    Returns:
        Detached CheckRecord rows
    """
    db = get_db()
    with db.get_session() as session:
        records = session.query(CheckRecord).filter(
            CheckRecord.status == "fail"
        ).order_by(CheckRecord.id.desc()).limit(limit).all()

        # Detach from session to avoid lazy loading issues
        session.expunge_all()
        return records
